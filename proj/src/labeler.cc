#include "cotype/labeler.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>
#include <sstream>

#include "cotype/util.h"
#include "json.hpp"

namespace cotype {

using nlohmann::json;

std::vector<EntityMention> make_entity_mentions(const Corpus& corpus, std::vector<MentionSpan> spans) {
  std::sort(spans.begin(), spans.end());
  spans.erase(std::unique(spans.begin(), spans.end()), spans.end());
  std::vector<EntityMention> out;
  out.reserve(spans.size());
  for (const auto& m : spans) {
    EntityMention em;
    em.id = static_cast<uint32_t>(out.size());
    em.sentence = m.sentence;
    em.span = m.span;
    em.surface = corpus.sentence(m.sentence).surface(m.span);
    out.push_back(std::move(em));
  }
  return out;
}

LinkPartition link_mentions(std::vector<EntityMention>& mentions, const KnowledgeBase& kb) {
  LinkPartition part;
  for (auto& m : mentions) {
    m.entity = kb.link(m.surface);
    if (m.entity) {
      m.types = kb.entity(*m.entity).type_ids;
      part.linked.push_back(m.id);
    } else {
      m.types.clear();
      part.unlinkable.push_back(m.id);
    }
  }
  return part;
}

std::vector<RelationMention> generate_relation_mentions(const std::vector<EntityMention>& mentions) {
  std::vector<RelationMention> out;
  size_t i = 0;
  while (i < mentions.size()) {
    size_t j = i;
    while (j < mentions.size() && mentions[j].sentence == mentions[i].sentence) ++j;
    for (size_t a = i; a < j; ++a) {
      for (size_t b = i; b < j; ++b) {
        if (a == b || mentions[a].span.overlaps(mentions[b].span)) continue;
        RelationMention rm;
        rm.id = static_cast<uint32_t>(out.size());
        rm.arg1 = mentions[a].id;
        rm.arg2 = mentions[b].id;
        rm.sentence = mentions[a].sentence;
        out.push_back(std::move(rm));
      }
    }
    i = j;
  }
  return out;
}

CandidateAssignment assign_candidate_types(std::vector<RelationMention> relations,
                                           const std::vector<EntityMention>& mentions, const KnowledgeBase& kb) {
  CandidateAssignment out;
  for (auto& rm : relations) {
    const auto& m1 = mentions.at(rm.arg1);
    const auto& m2 = mentions.at(rm.arg2);
    if (!m1.entity || !m2.entity) {
      rm.types.clear();
      out.unlabeled.push_back(std::move(rm));
      continue;
    }
    rm.types = kb.relations_between(*m1.entity, *m2.entity);
    (rm.types.empty() ? out.none_pool : out.linked).push_back(std::move(rm));
  }
  return out;
}

std::vector<size_t> sample_none_examples(size_t pool_size, double ratio, uint64_t seed) {
  if (!(ratio > 0.0) || ratio > 1.0) throw InputError("None sampling ratio must be in (0, 1]");
  if (pool_size == 0) {
    std::cerr << "warning: empty pool for None sampling\n";
    return {};
  }
  // Integer floor of pool * ratio, guarded against 0.3 * 10 = 2.9999...
  const size_t k = std::min(pool_size, static_cast<size_t>(std::floor(static_cast<double>(pool_size) * ratio + 1e-9)));
  std::vector<size_t> idx(pool_size);
  for (size_t i = 0; i < pool_size; ++i) idx[i] = i;
  Rng rng(seed);
  for (size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.uniform_index(pool_size - i)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

double multi_candidate_fraction(const std::vector<RelationMention>& relations) {
  if (relations.empty()) return 0.0;
  size_t multi = 0;
  for (const auto& r : relations) multi += r.types.size() >= 2;
  return static_cast<double>(multi) / static_cast<double>(relations.size());
}

LabelStats compute_label_stats(const LabeledCorpus& dl, const TypeHierarchy& hierarchy) {
  LabelStats st;
  st.num_relation_mentions = dl.relations.size();
  st.num_entity_mentions = dl.linked_entities.size();
  st.num_none_relations = dl.none_relations.size();
  st.num_none_entities = dl.none_entities.size();
  st.num_unlabeled_relations = dl.unlabeled.size();
  st.num_detected_mentions = dl.mentions.size();
  for (const auto& r : dl.relations) {
    for (TypeId t : r.types) ++st.relation_type_histogram[hierarchy.relation_type_name(t)];
  }
  st.relation_type_histogram[std::string(TypeHierarchy::kNoneName)] = dl.none_relations.size();
  size_t sibling = 0;
  for (uint32_t id : dl.linked_entities) {
    const auto& types = dl.mentions[id].types;
    for (TypeId t : types) ++st.entity_type_histogram[hierarchy.entity_type_name(t)];
    std::set<TypeId> parents;
    bool multi = false;
    for (TypeId t : types) multi |= !parents.insert(hierarchy.parent(t)).second;
    sibling += multi;
  }
  st.entity_type_histogram[std::string(TypeHierarchy::kNoneName)] = dl.none_entities.size();
  st.multi_relation_fraction = multi_candidate_fraction(dl.relations);
  st.multi_sibling_fraction =
      dl.linked_entities.empty() ? 0.0 : static_cast<double>(sibling) / static_cast<double>(dl.linked_entities.size());
  return st;
}

LabeledCorpus build_labeled_corpus(const Corpus& corpus, std::vector<MentionSpan> spans, const KnowledgeBase& kb,
                                   const LabelerConfig& config) {
  LabeledCorpus dl;
  dl.mentions = make_entity_mentions(corpus, std::move(spans));
  const LinkPartition part = link_mentions(dl.mentions, kb);
  auto assigned = assign_candidate_types(generate_relation_mentions(dl.mentions), dl.mentions, kb);
  if (assigned.linked.empty()) throw Error("no linkable relation mentions: N_L = 0");

  dl.relations = std::move(assigned.linked);
  dl.unlabeled = std::move(assigned.unlabeled);
  const TypeId none_rel = kb.hierarchy().none_relation_type();
  for (size_t i : sample_none_examples(assigned.none_pool.size(), config.none_ratio, mix_seed(config.seed, 31))) {
    RelationMention rm = assigned.none_pool[i];
    rm.types = {none_rel};
    dl.none_relations.push_back(std::move(rm));
  }
  dl.linked_entities = part.linked;
  const TypeId none_ent = kb.hierarchy().none_entity_type();
  for (size_t i : sample_none_examples(part.unlinkable.size(), config.none_ratio, mix_seed(config.seed, 32))) {
    const uint32_t id = part.unlinkable[i];
    dl.mentions[id].types = {none_ent};
    dl.none_entities.push_back(id);
  }
  dl.stats = compute_label_stats(dl, kb.hierarchy());
  return dl;
}

namespace {

json mention_json(const EntityMention& m, const Corpus& corpus, const TypeHierarchy& h) {
  const auto& s = corpus.sentence(m.sentence);
  json types = json::array();
  for (TypeId t : m.types) types.push_back(h.entity_type_name(t));
  return json{{"id", m.id},         {"doc", s.doc_id},       {"sentence", s.index}, {"start", m.span.start},
              {"end", m.span.end}, {"surface", m.surface}, {"types", types}};
}

std::string jsonl(const std::vector<json>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

std::vector<json> parse_jsonl(const std::string& content, const std::string& what) {
  std::vector<json> out;
  std::istringstream in(content);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw InputError(what + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

LabeledCorpusFiles serialize_labeled_corpus(const LabeledCorpus& dl, const Corpus& corpus,
                                            const TypeHierarchy& hierarchy) {
  std::vector<json> rel_records;
  auto add_relations = [&](const std::vector<RelationMention>& rels) {
    for (const auto& r : rels) {
      json types = json::array();
      for (TypeId t : r.types) types.push_back(hierarchy.relation_type_name(t));
      const auto& s = corpus.sentence(r.sentence);
      rel_records.push_back(json{{"id", r.id},
                                 {"doc", s.doc_id},
                                 {"sentence", s.index},
                                 {"em1", mention_json(dl.mentions[r.arg1], corpus, hierarchy)},
                                 {"em2", mention_json(dl.mentions[r.arg2], corpus, hierarchy)},
                                 {"relation_types", types}});
    }
  };
  add_relations(dl.relations);
  add_relations(dl.none_relations);
  std::vector<json> ent, none;
  for (uint32_t id : dl.linked_entities) ent.push_back(mention_json(dl.mentions[id], corpus, hierarchy));
  for (uint32_t id : dl.none_entities) none.push_back(mention_json(dl.mentions[id], corpus, hierarchy));
  return {jsonl(rel_records), jsonl(ent), jsonl(none)};
}

LabeledCorpus parse_labeled_corpus(const LabeledCorpusFiles& files, const Corpus& corpus,
                                   const TypeHierarchy& hierarchy) {
  LabeledCorpus dl;
  std::map<std::pair<size_t, Span>, uint32_t> by_span;
  auto intern = [&](const json& j) -> uint32_t {
    const auto sent = corpus.find_sentence(j.at("doc").get<std::string>(), j.at("sentence").get<uint32_t>());
    if (!sent) throw InputError("labeled corpus references unknown sentence " + j.at("doc").get<std::string>());
    const Span span{j.at("start").get<uint32_t>(), j.at("end").get<uint32_t>()};
    if (span.start >= span.end || span.end > corpus.sentence(*sent).tokens.size()) {
      throw InputError("labeled corpus span outside sentence");
    }
    auto key = std::make_pair(*sent, span);
    auto [it, inserted] = by_span.emplace(key, static_cast<uint32_t>(dl.mentions.size()));
    if (inserted) {
      EntityMention m;
      m.id = it->second;
      m.sentence = *sent;
      m.span = span;
      m.surface = corpus.sentence(*sent).surface(span);
      for (const auto& t : j.at("types")) {
        auto id = hierarchy.find_entity_type(t.get<std::string>());
        if (!id) throw InputError("labeled corpus references unknown entity type " + t.get<std::string>());
        m.types.push_back(*id);
      }
      std::sort(m.types.begin(), m.types.end());
      dl.mentions.push_back(std::move(m));
    }
    return it->second;
  };

  try {
    std::set<uint32_t> linked;
    for (const auto& j : parse_jsonl(files.relations, "relations")) {
      RelationMention r;
      r.id = j.at("id").get<uint32_t>();
      r.arg1 = intern(j.at("em1"));
      r.arg2 = intern(j.at("em2"));
      r.sentence = dl.mentions[r.arg1].sentence;
      bool none = false;
      for (const auto& t : j.at("relation_types")) {
        auto id = hierarchy.find_relation_type(t.get<std::string>());
        if (!id) throw InputError("labeled corpus references unknown relation type " + t.get<std::string>());
        none |= *id == hierarchy.none_relation_type();
        r.types.push_back(*id);
      }
      std::sort(r.types.begin(), r.types.end());
      linked.insert(r.arg1);
      linked.insert(r.arg2);
      (none ? dl.none_relations : dl.relations).push_back(std::move(r));
    }
    for (const auto& j : parse_jsonl(files.entities, "entities")) linked.insert(intern(j));
    dl.linked_entities.assign(linked.begin(), linked.end());
    std::set<uint32_t> none;
    for (const auto& j : parse_jsonl(files.none_entities, "none_entities")) none.insert(intern(j));
    dl.none_entities.assign(none.begin(), none.end());
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed labeled corpus record: ") + e.what());
  }
  dl.stats = compute_label_stats(dl, hierarchy);
  return dl;
}

std::string label_stats_json(const LabelStats& st) {
  json j{{"N_L", st.num_relation_mentions},
         {"N_L_entities", st.num_entity_mentions},
         {"none_relations", st.num_none_relations},
         {"none_entities", st.num_none_entities},
         {"unlabeled_relations", st.num_unlabeled_relations},
         {"detected_mentions", st.num_detected_mentions},
         {"relation_type_histogram", st.relation_type_histogram},
         {"entity_type_histogram", st.entity_type_histogram},
         {"multi_relation_fraction", st.multi_relation_fraction},
         {"multi_sibling_fraction", st.multi_sibling_fraction}};
  return j.dump(2) + "\n";
}

}  // namespace cotype
