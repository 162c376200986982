#include "cotype/features.h"

#include <algorithm>
#include <map>
#include <sstream>

#include "cotype/util.h"

namespace cotype {

BrownClusters load_brown_clusters(const std::string& path) {
  BrownClusters out;
  std::istringstream in(read_file(path));
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() < 2) throw InputError(path + ":" + std::to_string(line_no) + ": expected token<TAB>bitstring");
    out[cols[0]] = std::string(trim(cols[1]));
  }
  return out;
}

size_t head_index(Span span) { return span.end - 1; }

std::string word_shape(const std::string& token) {
  std::string shape;
  shape.reserve(token.size());
  for (unsigned char ch : token) {
    if (ch >= 'A' && ch <= 'Z') {
      shape += 'A';
    } else if (ch >= 'a' && ch <= 'z') {
      shape += 'a';
    } else if (ch >= '0' && ch <= '9') {
      shape += '0';
    } else {
      shape += static_cast<char>(ch);
    }
  }
  return shape;
}

namespace {

void add_brown(std::vector<std::string>& out, const BrownClusters* brown, const std::string& token) {
  if (!brown) return;
  auto it = brown->find(token);
  if (it == brown->end()) return;
  for (size_t len : kBrownPrefixes) {
    out.push_back(std::to_string(len) + "_" + it->second.substr(0, len));
  }
}

void add_bigrams(std::vector<std::string>& out, const std::vector<const Token*>& seq) {
  for (size_t i = 0; i + 1 < seq.size(); ++i) out.push_back(seq[i]->text + " " + seq[i + 1]->text);
}

// Bigrams over the left window plus the first mention token, and over the
// last mention token plus the right window.
void add_collocations(std::vector<std::string>& out, const Sentence& s, Span span, size_t k) {
  const ContextWindow w = window(s, span, k);
  std::vector<const Token*> left, right;
  for (const auto& t : w.left) left.push_back(&t);
  left.push_back(&s.tokens[span.start]);
  right.push_back(&s.tokens[span.end - 1]);
  for (const auto& t : w.right) right.push_back(&t);
  add_bigrams(out, left);
  add_bigrams(out, right);
}

}  // namespace

std::vector<std::string> extract_relation_features(const Sentence& s, Span em1, Span em2,
                                                   const FeatureOptions& options) {
  // Validates both spans.
  window(s, em1, 0);
  window(s, em2, 0);
  std::vector<std::string> out;
  const std::pair<const char*, Span> args[] = {{"EM1", em1}, {"EM2", em2}};
  for (const auto& [tag, span] : args) {
    out.push_back(std::string("HEAD_") + tag + "_" + s.tokens[head_index(span)].text);
    for (uint32_t i = span.start; i < span.end; ++i) {
      out.push_back(std::string("TKN_") + tag + "_" + s.tokens[i].text);
      add_brown(out, options.brown, s.tokens[i].text);
    }
  }

  const bool first_is_em1 = em1.start < em2.start;
  const Span a = first_is_em1 ? em1 : em2;
  const Span b = first_is_em1 ? em2 : em1;
  const uint32_t between_start = std::min(a.end, b.start);
  const uint32_t between_end = std::max(a.end, b.start);
  for (uint32_t i = between_start; i < between_end; ++i) {
    out.push_back(s.tokens[i].text);
    out.push_back(s.tokens[i].pos);
    add_brown(out, options.brown, s.tokens[i].text);
  }

  for (Span span : {em1, em2}) {
    add_collocations(out, s, span, options.window);
    const ContextWindow w = window(s, span, 1);
    for (const auto& t : w.left) out.push_back(t.text);
    for (const auto& t : w.right) out.push_back(t.text);
  }

  out.push_back(first_is_em1 ? "EM1_BEFORE_EM2" : "EM2_BEFORE_EM1");
  out.push_back("EM_DISTANCE_" + std::to_string(between_end - between_start));
  const bool in_pattern = first_is_em1 && between_end - between_start == 1 && s.tokens[between_start].text == "in";
  out.push_back(in_pattern ? "PATTERN_EM1_IN_EM2" : "PATTERN_NULL");
  return out;
}

std::vector<std::string> extract_entity_features(const Sentence& s, Span m, const FeatureOptions& options) {
  const ContextWindow w = window(s, m, options.window);
  std::vector<std::string> out;
  const Token& head = s.tokens[head_index(m)];
  out.push_back("HEAD_" + head.text);
  for (uint32_t i = m.start; i < m.end; ++i) {
    out.push_back("TKN_" + s.tokens[i].text);
    add_brown(out, options.brown, s.tokens[i].text);
  }
  for (auto side : {w.left, w.right}) {
    for (size_t i = 0; i < side.size(); ++i) {
      out.push_back("CTXT_UNI_" + side[i].text);
      if (i + 1 < side.size()) out.push_back("CTXT_BI_" + side[i].text + "_" + side[i + 1].text);
    }
  }
  out.push_back("POS_HEAD_" + head.pos);
  out.push_back("LEN_" + std::to_string(m.size()));
  out.push_back("SHAPE_" + word_shape(head.text));
  return out;
}

std::vector<std::string> entity_type_features(int argument, const std::vector<std::string>& type_names) {
  std::vector<std::string> out;
  for (const auto& t : type_names) out.push_back("EM" + std::to_string(argument) + "_TYPE_" + t);
  return out;
}

FeatureDictionary FeatureDictionary::build(const std::vector<std::vector<std::string>>& mention_features,
                                           uint32_t min_count) {
  std::map<std::string, uint32_t> df;
  for (const auto& feats : mention_features) {
    std::vector<std::string> uniq = feats;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (auto& f : uniq) ++df[std::move(f)];
  }
  FeatureDictionary dict;
  dict.min_count_ = min_count;
  for (auto& [name, count] : df) {
    if (count < min_count) continue;
    dict.index_.emplace(name, static_cast<uint32_t>(dict.names_.size()));
    dict.names_.push_back(name);
    dict.df_.push_back(count);
  }
  if (dict.names_.empty()) throw Error("feature dictionary is empty after min_count pruning");
  return dict;
}

const uint32_t* FeatureDictionary::find(const std::string& feature) const {
  auto it = index_.find(feature);
  return it == index_.end() ? nullptr : &it->second;
}

FeatureVector FeatureDictionary::featurize(const std::vector<std::string>& features) const {
  std::map<uint32_t, uint32_t> counts;
  for (const auto& f : features) {
    if (const uint32_t* id = find(f)) ++counts[*id];
  }
  return FeatureVector(counts.begin(), counts.end());
}

std::string FeatureDictionary::serialize() const {
  std::string out;
  for (size_t i = 0; i < names_.size(); ++i) {
    out += std::to_string(i) + "\t" + names_[i] + "\t" + std::to_string(df_[i]) + "\n";
  }
  return out;
}

FeatureDictionary FeatureDictionary::parse(const std::string& content, const std::string& source) {
  FeatureDictionary dict;
  std::istringstream in(content);
  std::string line;
  size_t line_no = 0;
  uint32_t min_df = UINT32_MAX;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() != 3) throw InputError(source + ":" + std::to_string(line_no) + ": expected id<TAB>feature<TAB>D_f");
    try {
      if (std::stoul(cols[0]) != dict.names_.size()) {
        throw InputError(source + ":" + std::to_string(line_no) + ": feature ids must be dense and ascending");
      }
      const uint32_t df = static_cast<uint32_t>(std::stoul(cols[2]));
      dict.index_.emplace(cols[1], static_cast<uint32_t>(dict.names_.size()));
      dict.names_.push_back(cols[1]);
      dict.df_.push_back(df);
      min_df = std::min(min_df, df);
    } catch (const std::logic_error&) {
      throw InputError(source + ":" + std::to_string(line_no) + ": malformed number");
    }
  }
  if (dict.names_.empty()) throw InputError(source + ": empty feature dictionary");
  dict.min_count_ = min_df;
  return dict;
}

std::vector<const RelationMention*> relation_training_order(const LabeledCorpus& dl) {
  std::vector<const RelationMention*> out;
  for (const auto& r : dl.relations) out.push_back(&r);
  for (const auto& r : dl.none_relations) out.push_back(&r);
  return out;
}

std::vector<uint32_t> entity_training_order(const LabeledCorpus& dl) {
  std::vector<uint32_t> out = dl.linked_entities;
  out.insert(out.end(), dl.none_entities.begin(), dl.none_entities.end());
  return out;
}

std::vector<std::string> relation_mention_features(const Corpus& corpus, const LabeledCorpus& dl,
                                                   const RelationMention& rm, const FeatureOptions& options,
                                                   const EntityTypeInjection* injection) {
  const auto& m1 = dl.mentions.at(rm.arg1);
  const auto& m2 = dl.mentions.at(rm.arg2);
  auto feats = extract_relation_features(corpus.sentence(rm.sentence), m1.span, m2.span, options);
  if (injection) {
    for (auto& f : entity_type_features(1, injection->at(rm.arg1))) feats.push_back(std::move(f));
    for (auto& f : entity_type_features(2, injection->at(rm.arg2))) feats.push_back(std::move(f));
  }
  return feats;
}

namespace {

SpaceFeatures make_space(std::vector<std::vector<std::string>> raw, uint32_t min_count, int threads) {
  SpaceFeatures space{FeatureDictionary::build(raw, min_count), {}, {}};
  space.vectors.resize(raw.size());
  parallel_for(raw.size(), threads, [&](size_t i) { space.vectors[i] = space.dictionary.featurize(raw[i]); });
  space.empty.resize(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) space.empty[i] = space.vectors[i].empty();
  return space;
}

}  // namespace

FeaturizedCorpus featurize_corpus(const Corpus& corpus, const LabeledCorpus& dl, const FeatureConfig& config,
                                  const BrownClusters* brown, const EntityTypeInjection* injection, int threads) {
  const FeatureOptions options{config.window, brown};
  const auto rel_order = relation_training_order(dl);
  std::vector<std::vector<std::string>> rel_raw(rel_order.size());
  parallel_for(rel_order.size(), threads, [&](size_t i) {
    rel_raw[i] = relation_mention_features(corpus, dl, *rel_order[i], options, injection);
  });
  const auto ent_order = entity_training_order(dl);
  std::vector<std::vector<std::string>> ent_raw(ent_order.size());
  parallel_for(ent_order.size(), threads, [&](size_t i) {
    const auto& m = dl.mentions.at(ent_order[i]);
    ent_raw[i] = extract_entity_features(corpus.sentence(m.sentence), m.span, options);
  });
  FeaturizedCorpus out;
  out.relation = make_space(std::move(rel_raw), config.min_count, threads);
  out.entity = make_space(std::move(ent_raw), config.min_count, threads);
  return out;
}

std::string format_edges(const std::vector<FeatureVector>& vectors) {
  std::string out;
  for (size_t i = 0; i < vectors.size(); ++i) {
    for (const auto& [f, w] : vectors[i]) {
      out += std::to_string(i) + "\t" + std::to_string(f) + "\t" + std::to_string(w) + "\n";
    }
  }
  return out;
}

std::vector<FeatureVector> parse_edges(const std::string& content, size_t num_mentions, size_t num_features,
                                       const std::string& source) {
  std::vector<FeatureVector> out(num_mentions);
  std::istringstream in(content);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cols = split(line, '\t');
    const std::string where = source + ":" + std::to_string(line_no);
    if (cols.size() != 3) throw InputError(where + ": expected mention<TAB>feature<TAB>weight");
    size_t m, f, w;
    try {
      m = std::stoul(cols[0]);
      f = std::stoul(cols[1]);
      w = std::stoul(cols[2]);
    } catch (const std::logic_error&) {
      throw InputError(where + ": malformed number");
    }
    if (m >= num_mentions || f >= num_features || w == 0) throw InputError(where + ": edge out of range");
    out[m].emplace_back(static_cast<uint32_t>(f), static_cast<uint32_t>(w));
  }
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

}  // namespace cotype
