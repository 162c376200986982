#include "cotype/segmenter.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "cotype/util.h"

namespace cotype {
namespace {

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> kWords = {
      "a",     "an",    "the",   "of",    "in",    "on",    "at",    "to",    "for",   "from",  "by",
      "with",  "and",   "or",    "but",   "is",    "was",   "are",   "were",  "be",    "been",  "being",
      "has",   "have",  "had",   "do",    "does",  "did",   "that",  "this",  "these", "those", "it",
      "its",   "as",    "he",    "she",   "they",  "we",    "i",     "you",   "his",   "her",   "their",
      "our",   "my",    "your",  "which", "who",   "whom",  "whose", "what",  "when",  "where", "why",
      "how",   "not",   "no",    "so",    "if",    "then",  "than",  "there", "here",  "about", "into",
      "over",  "after", "before", "under", "also", "said",  "says",  "will",  "would", "can",   "could",
      "may",   "might", "should", "shall", "must", "very",  "just",  "up",    "out",   "more",  "most",
      "such",  "own",   "same",  "other", "some",  "any",   "each",  "all",   "both",  "few",   ".",
      ",",     ";",     ":",     "'s",    "\"",    "(",     ")",     "-",     "--",    "!",     "?"};
  return kWords;
}

bool is_stopword(const std::string& token) { return stopwords().count(ascii_lower(token)) > 0; }

std::string ngram(const std::vector<Token>& tokens, size_t start, size_t n, bool pos) {
  std::string out;
  for (size_t i = start; i < start + n; ++i) {
    if (i > start) out.push_back(' ');
    out += pos ? tokens[i].pos : tokens[i].text;
  }
  return out;
}

// Partial Fisher-Yates: first k items of a seeded permutation.
template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> pool, size_t k, Rng& rng) {
  k = std::min(k, pool.size());
  for (size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.uniform_index(pool.size() - i)]);
  pool.resize(k);
  return pool;
}

std::vector<std::string> sorted_keys_where(const auto& map, const auto& pred) {
  std::vector<std::string> keys;
  for (const auto& [k, v] : map) {
    if (pred(k, v)) keys.push_back(k);
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace

bool is_noun_like(const std::string& pos) { return pos == "NN" || pos == "NNS" || pos == "NNP" || pos == "NNPS"; }

// ---------------------------------------------------------------------------
// Pattern mining

PatternTable PatternTable::mine(const Corpus& corpus, size_t max_len, size_t min_support) {
  PatternTable table;
  table.max_len_ = max_len;
  table.min_support_ = min_support;
  table.num_sentences_ = corpus.num_sentences();

  for (const auto& s : corpus.sentences()) {
    std::unordered_set<std::string> seen;
    for (const auto& tok : s.tokens) {
      ++table.unigram_counts_[tok.text];
      ++table.total_tokens_;
      if (seen.insert(tok.text).second) ++table.unigram_df_[tok.text];
    }
  }

  // Level-wise (apriori) counting: an n-gram is counted only when both of its
  // (n-1)-gram sub-patterns were retained.
  for (int kind = 0; kind < 2; ++kind) {
    const bool pos = kind == 1;
    std::unordered_set<std::string> prev_level;
    for (size_t n = 1; n <= max_len; ++n) {
      std::unordered_map<std::string, uint32_t> counts;
      for (const auto& s : corpus.sentences()) {
        if (s.tokens.size() < n) continue;
        for (size_t i = 0; i + n <= s.tokens.size(); ++i) {
          if (n > 1 && (!prev_level.count(ngram(s.tokens, i, n - 1, pos)) ||
                        !prev_level.count(ngram(s.tokens, i + 1, n - 1, pos)))) {
            continue;
          }
          ++counts[ngram(s.tokens, i, n, pos)];
        }
      }
      std::unordered_set<std::string> level;
      for (auto& [key, c] : counts) {
        if (c < min_support) continue;
        level.insert(key);
        if (pos) {
          table.pos_[key] = {c, static_cast<uint32_t>(n)};
        } else {
          table.words_[key] = {c, static_cast<uint32_t>(n), {}};
        }
      }
      prev_level = std::move(level);
      if (prev_level.empty()) break;
    }
  }

  // POS sequences at retained word-pattern occurrences.
  std::unordered_map<std::string, std::map<std::string, uint32_t>> pos_at;
  for (const auto& s : corpus.sentences()) {
    for (size_t n = 1; n <= max_len && n <= s.tokens.size(); ++n) {
      for (size_t i = 0; i + n <= s.tokens.size(); ++i) {
        auto key = ngram(s.tokens, i, n, false);
        if (table.words_.count(key)) ++pos_at[key][ngram(s.tokens, i, n, true)];
      }
    }
  }
  for (auto& [key, m] : pos_at) table.words_[key].pos_sequences.assign(m.begin(), m.end());
  return table;
}

uint32_t PatternTable::count(const std::string& surface) const {
  if (auto it = words_.find(surface); it != words_.end()) return it->second.count;
  if (surface.find(' ') == std::string::npos) return unigram_count(surface);
  return 0;
}

uint32_t PatternTable::unigram_count(const std::string& token) const {
  auto it = unigram_counts_.find(token);
  return it == unigram_counts_.end() ? 0 : it->second;
}

uint32_t PatternTable::sentence_frequency(const std::string& token) const {
  auto it = unigram_df_.find(token);
  return it == unigram_df_.end() ? 0 : it->second;
}

bool PatternTable::retained(const std::string& surface) const { return words_.count(surface) > 0; }

// ---------------------------------------------------------------------------
// Quality examples and classifiers

QualityExamples build_quality_examples(const PatternTable& patterns, const KnowledgeBase& kb, double negative_ratio,
                                       uint64_t seed) {
  QualityExamples ex;
  std::set<std::string> pos_positive;
  ex.phrase_positive = sorted_keys_where(patterns.word_patterns(), [&](const std::string& k, const auto&) {
    return !kb.lookup_alias(k).empty();
  });
  if (ex.phrase_positive.empty()) throw Error("KB provides no supervision for this corpus");
  for (const auto& p : ex.phrase_positive) {
    for (const auto& [seq, c] : patterns.word_patterns().at(p).pos_sequences) pos_positive.insert(seq);
  }

  Rng rng(mix_seed(seed, 11));
  auto phrase_pool = sorted_keys_where(patterns.word_patterns(), [&](const std::string& k, const auto&) {
    return kb.lookup_alias(k).empty();
  });
  ex.phrase_negative = sample_without_replacement(
      std::move(phrase_pool), static_cast<size_t>(std::llround(negative_ratio * ex.phrase_positive.size())), rng);
  std::sort(ex.phrase_negative.begin(), ex.phrase_negative.end());

  // One POS row per example phrase, so the POS model sees as many rows as the
  // phrase model even when few distinct tag sequences occur.
  auto dominant = [&](const std::string& phrase) {
    const auto& seqs = patterns.word_patterns().at(phrase).pos_sequences;
    std::string best;
    uint64_t best_count = 0;
    for (const auto& [seq, c] : seqs) {
      if (c > best_count || (c == best_count && seq < best)) {
        best = seq;
        best_count = c;
      }
    }
    return best;
  };
  for (const auto& p : ex.phrase_positive) ex.pos_positive.push_back(dominant(p));
  for (const auto& p : ex.phrase_negative) {
    std::string seq = dominant(p);
    if (!seq.empty() && !pos_positive.count(seq)) ex.pos_negative.push_back(std::move(seq));
  }
  return ex;
}

QualityFeaturizer::QualityFeaturizer(const PatternTable& patterns,
                                     const std::unordered_set<std::string>& positive_phrases,
                                     const RectifiedCounts* rectified)
    : patterns_(patterns), rectified_(rectified) {
  for (const auto& p : positive_phrases) {
    auto it = patterns.word_patterns().find(p);
    if (it == patterns.word_patterns().end()) continue;
    for (const auto& [seq, c] : it->second.pos_sequences) pos_positive_counts_[seq] += c;
  }
}

std::vector<double> QualityFeaturizer::phrase_features(const std::string& surface) const {
  const auto tokens = split(surface, ' ');
  const size_t n = tokens.size();
  const double total = static_cast<double>(std::max<uint64_t>(1, patterns_.total_tokens()));
  const double raw = std::max<double>(1.0, patterns_.count(surface));

  double freq = raw;
  if (rectified_) {
    auto it = rectified_->word_segments.find(surface);
    freq = it == rectified_->word_segments.end() ? 0.0 : it->second;
  }

  double npmi = 0.0;
  double independence = 0.0;
  if (n > 1) {
    const double log_pc = std::log(raw / total);
    npmi = -std::numeric_limits<double>::infinity();
    for (size_t k = 1; k < n; ++k) {
      std::vector<std::string> l(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(k));
      std::vector<std::string> r(tokens.begin() + static_cast<std::ptrdiff_t>(k), tokens.end());
      const double cl = std::max<double>(1.0, patterns_.count(join(l, " ")));
      const double cr = std::max<double>(1.0, patterns_.count(join(r, " ")));
      const double pmi = log_pc - std::log(cl / total) - std::log(cr / total);
      const double denom = -log_pc;
      npmi = std::max(npmi, denom > 0 ? pmi / denom : 0.0);
    }
    independence = std::log(raw);
    for (const auto& t : tokens) independence -= std::log(std::max<double>(1.0, patterns_.unigram_count(t)));
  }

  const double boundary_stop = (is_stopword(tokens.front()) || is_stopword(tokens.back())) ? 1.0 : 0.0;
  double idf = 0.0, caps = 0.0;
  const double sentences = static_cast<double>(std::max<uint64_t>(1, patterns_.num_sentences()));
  for (const auto& t : tokens) {
    idf += std::log(sentences / (1.0 + patterns_.sentence_frequency(t)));
    caps += starts_with_upper(t) ? 1.0 : 0.0;
  }
  return {std::log1p(freq), npmi, independence, boundary_stop, idf / n, caps / n};
}

std::vector<double> QualityFeaturizer::pos_features(const std::string& pos_pattern) const {
  const double length = static_cast<double>(split(pos_pattern, ' ').size());
  double freq = 0.0, positive = 0.0;
  if (rectified_) {
    if (auto it = rectified_->pos_segments.find(pos_pattern); it != rectified_->pos_segments.end()) freq = it->second;
    if (auto it = rectified_->pos_positive_segments.find(pos_pattern); it != rectified_->pos_positive_segments.end()) {
      positive = it->second;
    }
  } else {
    if (auto it = patterns_.pos_patterns().find(pos_pattern); it != patterns_.pos_patterns().end()) {
      freq = it->second.count;
    }
    if (auto it = pos_positive_counts_.find(pos_pattern); it != pos_positive_counts_.end()) positive = it->second;
  }
  const double fraction = freq > 0 ? std::min(1.0, positive / freq) : 0.0;
  return {std::log1p(freq), fraction, length};
}

namespace {

RandomForest fit(const std::vector<std::string>& positive, const std::vector<std::string>& negative,
                 const std::function<std::vector<double>(const std::string&)>& features, const SegmenterConfig& config,
                 uint64_t salt, double* accuracy) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (const auto& p : positive) {
    rows.push_back(features(p));
    labels.push_back(1);
  }
  for (const auto& p : negative) {
    rows.push_back(features(p));
    labels.push_back(0);
  }
  RandomForest::Options opts;
  opts.num_trees = config.num_trees;
  opts.max_depth = config.max_depth;
  opts.seed = mix_seed(config.seed, salt);
  RandomForest forest = RandomForest::train(rows, labels, opts);
  size_t correct = 0;
  for (size_t i = 0; i < rows.size(); ++i) correct += ((forest.predict(rows[i]) >= 0.5) == (labels[i] == 1));
  *accuracy = static_cast<double>(correct) / static_cast<double>(rows.size());
  return forest;
}

}  // namespace

QualityModel train_quality_models(const QualityExamples& examples, const QualityFeaturizer& featurizer,
                                  const SegmenterConfig& config) {
  if (examples.phrase_positive.size() < config.min_examples) {
    throw Error("too few positive phrase examples: " + std::to_string(examples.phrase_positive.size()) + " < " +
                std::to_string(config.min_examples));
  }
  QualityModel model;
  model.phrase =
      fit(examples.phrase_positive, examples.phrase_negative,
          [&](const std::string& s) { return featurizer.phrase_features(s); }, config, 21, &model.phrase_training_accuracy);
  model.pos = fit(examples.pos_positive, examples.pos_negative,
                  [&](const std::string& s) { return featurizer.pos_features(s); }, config, 22,
                  &model.pos_training_accuracy);
  return model;
}

double QualityScorer::phrase_score(const std::string& surface) {
  auto it = phrase_cache_.find(surface);
  if (it != phrase_cache_.end()) return it->second;
  const double s = model_.phrase.predict(featurizer_.phrase_features(surface));
  phrase_cache_.emplace(surface, s);
  return s;
}

double QualityScorer::pos_score(const std::string& pos_pattern) {
  auto it = pos_cache_.find(pos_pattern);
  if (it != pos_cache_.end()) return it->second;
  const double s = model_.pos.predict(featurizer_.pos_features(pos_pattern));
  pos_cache_.emplace(pos_pattern, s);
  return s;
}

double QualityScorer::score(const Sentence& sentence, Span span) {
  const std::string surface = sentence.surface(span);
  if (span.size() > 1 && !patterns_.retained(surface)) return kNotCandidate;
  return combine_quality(phrase_score(surface), pos_score(sentence.pos_pattern(span)));
}

// ---------------------------------------------------------------------------
// Priors and Viterbi segmentation

SegmentPriors::SegmentPriors(std::vector<double> length_prob,
                             std::vector<std::unordered_map<std::string, double>> conditional, double epsilon_unseen)
    : length_prob_(std::move(length_prob)), conditional_(std::move(conditional)), epsilon_(epsilon_unseen) {}

SegmentPriors SegmentPriors::from_patterns(const PatternTable& patterns, double epsilon_unseen) {
  const size_t max_len = patterns.max_len();
  std::vector<double> length_prob(max_len + 1, 1.0 / static_cast<double>(max_len));
  length_prob[0] = 0.0;
  std::vector<std::unordered_map<std::string, double>> cond(max_len + 1);
  std::vector<double> totals(max_len + 1, 0.0);
  for (const auto& [k, p] : patterns.word_patterns()) {
    if (p.length > 1) totals[p.length] += p.count;
  }
  totals[1] = static_cast<double>(patterns.total_tokens());
  for (const auto& [k, p] : patterns.word_patterns()) {
    if (p.length > 1) cond[p.length][k] = (1.0 - epsilon_unseen) * p.count / totals[p.length];
  }
  // Every token type, including those below min_support.
  for (const auto& [token, c] : patterns.unigram_counts()) {
    cond[1][token] = (1.0 - epsilon_unseen) * c / std::max(1.0, totals[1]);
  }
  return SegmentPriors(std::move(length_prob), std::move(cond), epsilon_unseen);
}

double SegmentPriors::conditional(size_t len, const std::string& surface) const {
  if (len < conditional_.size()) {
    const auto& m = conditional_[len];
    if (auto it = m.find(surface); it != m.end()) return it->second;
  }
  return epsilon_;
}

double SegmentPriors::floor_log(double p) const {
  const double floor = std::log(epsilon_);
  if (!(p > 0.0)) return floor;
  return std::max(std::log(p), floor);
}

std::vector<Span> Segmentation::segments() const {
  std::vector<Span> out;
  for (size_t i = 0; i + 1 < boundaries.size(); ++i) out.push_back({boundaries[i], boundaries[i + 1]});
  return out;
}

Segmentation viterbi_segment(size_t n, size_t max_len, const std::function<double(size_t, size_t)>& segment_score) {
  Segmentation seg;
  if (n == 0) {
    seg.boundaries = {0};
    return seg;
  }
  // Suffix DP so that ties resolve by the first (leftmost) segment length.
  std::vector<double> best(n + 1, -std::numeric_limits<double>::infinity());
  std::vector<size_t> count(n + 1, 0);
  std::vector<size_t> choice(n + 1, 0);
  best[n] = 0.0;
  for (size_t i = n; i-- > 0;) {
    for (size_t len = 1; len <= max_len && i + len <= n; ++len) {
      const double cand = segment_score(i, len) + best[i + len];
      const size_t cnt = count[i + len] + 1;
      const bool better = cand > best[i] || (cand == best[i] && (cnt < count[i] || (cnt == count[i])));
      if (choice[i] == 0 || better) {
        best[i] = cand;
        count[i] = cnt;
        choice[i] = len;
      }
    }
  }
  seg.log_likelihood = best[0];
  seg.boundaries.push_back(0);
  for (size_t i = 0; i < n; i += choice[i]) seg.boundaries.push_back(static_cast<uint32_t>(i + choice[i]));
  return seg;
}

std::vector<SpanQuality> compute_span_quality(const Corpus& corpus, QualityScorer& scorer, size_t max_len) {
  std::vector<SpanQuality> out(corpus.num_sentences());
  for (size_t s = 0; s < corpus.num_sentences(); ++s) {
    const auto& sent = corpus.sentence(s);
    const size_t n = sent.tokens.size();
    out[s].assign(n * max_len, 0.0);
    for (size_t i = 0; i < n; ++i) {
      for (size_t len = 1; len <= max_len && i + len <= n; ++len) {
        out[s][i * max_len + len - 1] =
            scorer.score(sent, {static_cast<uint32_t>(i), static_cast<uint32_t>(i + len)});
      }
    }
  }
  return out;
}

double segment_log_score(const Sentence& sentence, Span span, double quality, const SegmentPriors& priors) {
  const size_t len = span.size();
  if (len > 1 && quality < 0.0) return -std::numeric_limits<double>::infinity();
  double score = priors.floor_log(len <= priors.max_len() ? priors.length_prob(len) : 0.0) +
                 priors.floor_log(priors.conditional(len, sentence.surface(span)));
  if (len > 1) score += priors.floor_log(quality);
  return score;
}

Segmentation segment_sentence(const Sentence& sentence, const SpanQuality& quality, const SegmentPriors& priors,
                              size_t max_len) {
  return viterbi_segment(sentence.tokens.size(), max_len, [&](size_t start, size_t len) {
    return segment_log_score(sentence, {static_cast<uint32_t>(start), static_cast<uint32_t>(start + len)},
                             quality[start * max_len + len - 1], priors);
  });
}

std::vector<Segmentation> segment_corpus(const Corpus& corpus, const std::vector<SpanQuality>& quality,
                                         const SegmentPriors& priors, size_t max_len, int threads) {
  std::vector<Segmentation> out(corpus.num_sentences());
  parallel_for(corpus.num_sentences(), threads,
               [&](size_t s) { out[s] = segment_sentence(corpus.sentence(s), quality[s], priors, max_len); });
  return out;
}

SegmentPriors estimate_priors(const Corpus& corpus, const std::vector<Segmentation>& segmentation, size_t max_len,
                              double epsilon_unseen) {
  std::vector<double> length_counts(max_len + 1, 0.0);
  std::vector<std::unordered_map<std::string, double>> cond(max_len + 1);
  for (size_t s = 0; s < segmentation.size(); ++s) {
    const auto& sent = corpus.sentence(s);
    for (const auto& span : segmentation[s].segments()) {
      const size_t len = span.size();
      if (len > max_len) continue;
      length_counts[len] += 1.0;
      cond[len][sent.surface(span)] += 1.0;
    }
  }
  double total = 0.0;
  for (size_t l = 1; l <= max_len; ++l) total += length_counts[l];
  std::vector<double> length_prob(max_len + 1, 0.0);
  for (size_t l = 1; l <= max_len; ++l) {
    length_prob[l] = (length_counts[l] + 1.0) / (total + static_cast<double>(max_len));
  }
  for (size_t l = 1; l <= max_len; ++l) {
    for (auto& [k, c] : cond[l]) c = (1.0 - epsilon_unseen) * c / length_counts[l];
  }
  return SegmentPriors(std::move(length_prob), std::move(cond), epsilon_unseen);
}

std::vector<double> viterbi_training(const Corpus& corpus, const std::vector<SpanQuality>& quality,
                                     SegmentPriors& priors, size_t max_len, int rounds, double epsilon_unseen) {
  std::vector<double> trace;
  for (int r = 0; r < rounds; ++r) {
    auto segs = segment_corpus(corpus, quality, priors, max_len);
    double ll = 0.0;
    for (const auto& s : segs) ll += s.log_likelihood;
    trace.push_back(ll);
    priors = estimate_priors(corpus, segs, max_len, epsilon_unseen);
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Full Viterbi-training loop

namespace {

RectifiedCounts rectify(const Corpus& corpus, const std::vector<Segmentation>& segmentation,
                        const std::unordered_set<std::string>& positives) {
  RectifiedCounts rc;
  for (size_t s = 0; s < segmentation.size(); ++s) {
    const auto& sent = corpus.sentence(s);
    for (const auto& span : segmentation[s].segments()) {
      const auto surface = sent.surface(span);
      const auto pos = sent.pos_pattern(span);
      ++rc.word_segments[surface];
      ++rc.pos_segments[pos];
      if (positives.count(surface)) ++rc.pos_positive_segments[pos];
    }
  }
  return rc;
}

}  // namespace

std::vector<MentionSpan> extract_mentions(const Corpus& corpus, const std::vector<Segmentation>& segmentation,
                                          const std::vector<SpanQuality>& quality, size_t max_len, double q_min) {
  std::vector<MentionSpan> out;
  for (size_t s = 0; s < segmentation.size(); ++s) {
    const auto& sent = corpus.sentence(s);
    for (const auto& span : segmentation[s].segments()) {
      if (span.size() > 1) {
        out.push_back({s, span});
      } else if (is_noun_like(sent.tokens[span.start].pos) && quality[s][span.start * max_len] >= q_min) {
        out.push_back({s, span});
      }
    }
  }
  return out;
}

SegmentationRun run_segmentation(const Corpus& corpus, const KnowledgeBase& kb, const SegmenterConfig& config) {
  if (config.max_len < 1 || config.min_support < 1) throw InputError("segmenter: max_len and min_support must be >= 1");
  SegmentationRun run;
  SegmenterModel& model = run.model;
  model.config = config;
  model.patterns = PatternTable::mine(corpus, config.max_len, config.min_support);
  const QualityExamples examples =
      build_quality_examples(model.patterns, kb, config.negative_ratio, config.seed);
  model.positive_phrases.insert(examples.phrase_positive.begin(), examples.phrase_positive.end());
  SegmentPriors priors = SegmentPriors::from_patterns(model.patterns, config.epsilon_unseen);

  RectifiedCounts rectified;
  bool use_rectified = false;
  std::vector<SpanQuality> quality;
  double previous = 0.0;
  for (int round = 1; round <= config.max_rounds; ++round) {
    QualityFeaturizer featurizer(model.patterns, model.positive_phrases, use_rectified ? &rectified : nullptr);
    QualityModel qm = train_quality_models(examples, featurizer, config);
    QualityScorer scorer(qm, featurizer, model.patterns);
    quality = compute_span_quality(corpus, scorer, config.max_len);
    run.segmentation = segment_corpus(corpus, quality, priors, config.max_len, config.threads);
    double ll = 0.0;
    for (const auto& s : run.segmentation) ll += s.log_likelihood;
    run.log_likelihood_trace.push_back(ll);
    run.rounds = round;

    model.quality = std::move(qm);
    model.rectified = rectified;
    model.use_rectified = use_rectified;
    priors = estimate_priors(corpus, run.segmentation, config.max_len, config.epsilon_unseen);
    rectified = rectify(corpus, run.segmentation, model.positive_phrases);
    use_rectified = true;
    if (round > 1 && std::abs(ll - previous) <= config.seg_tol * std::abs(previous)) break;
    previous = ll;
  }
  model.priors = std::move(priors);
  run.mentions = extract_mentions(corpus, run.segmentation, quality, config.max_len, config.q_min);
  return run;
}

std::vector<MentionSpan> detect_mentions(const SegmenterModel& model, const Corpus& corpus) {
  QualityFeaturizer featurizer(model.patterns, model.positive_phrases,
                               model.use_rectified ? &model.rectified : nullptr);
  QualityScorer scorer(model.quality, featurizer, model.patterns);
  const size_t max_len = model.config.max_len;
  auto quality = compute_span_quality(corpus, scorer, max_len);
  auto segs = segment_corpus(corpus, quality, model.priors, max_len, model.config.threads);
  return extract_mentions(corpus, segs, quality, max_len, model.config.q_min);
}

std::string format_mentions(const Corpus& corpus, const std::vector<MentionSpan>& mentions) {
  std::ostringstream out;
  for (const auto& m : mentions) {
    const auto& s = corpus.sentence(m.sentence);
    out << s.doc_id << '\t' << s.index << '\t' << m.span.start << '\t' << m.span.end << '\t' << s.surface(m.span)
        << '\n';
  }
  return out.str();
}

std::vector<MentionSpan> parse_mentions(const std::string& content, const Corpus& corpus, const std::string& source) {
  std::vector<MentionSpan> out;
  size_t line_no = 0;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    auto cols = split(line, '\t');
    const std::string at = source + ":" + std::to_string(line_no) + ": ";
    if (cols.size() != 5) throw InputError(at + "expected 5 tab-separated columns");
    try {
      const auto idx = corpus.find_sentence(cols[0], static_cast<uint32_t>(std::stoul(cols[1])));
      if (!idx) throw InputError(at + "unknown sentence " + cols[0] + "/" + cols[1]);
      Span span{static_cast<uint32_t>(std::stoul(cols[2])), static_cast<uint32_t>(std::stoul(cols[3]))};
      if (span.start >= span.end || span.end > corpus.sentence(*idx).tokens.size()) {
        throw InputError(at + "span outside sentence");
      }
      out.push_back({*idx, span});
    } catch (const std::invalid_argument&) {
      throw InputError(at + "non-numeric index");
    } catch (const std::out_of_range&) {
      throw InputError(at + "index out of range");
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace cotype
