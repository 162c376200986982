#ifndef COTYPE_SEGMENTER_H_
#define COTYPE_SEGMENTER_H_

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cotype/corpus.h"
#include "cotype/kb.h"
#include "cotype/random_forest.h"

namespace cotype {

struct SegmenterConfig {
  size_t max_len = 6;
  size_t min_support = 3;
  double negative_ratio = 2.0;
  double seg_tol = 1e-3;
  int max_rounds = 5;
  double q_min = 0.5;
  double epsilon_unseen = 1e-6;
  int num_trees = 100;
  int max_depth = 8;
  size_t min_examples = 20;
  uint64_t seed = 1;
  int threads = 1;
};

// Frequent contiguous word and POS n-grams (n <= max_len) with exact counts.
// Unigram word statistics are kept for every token type since they feed the
// concordance features of longer patterns.
class PatternTable {
 public:
  struct WordPattern {
    uint32_t count = 0;
    uint32_t length = 0;
    // POS sequences observed at this pattern's occurrences, with counts.
    std::vector<std::pair<std::string, uint32_t>> pos_sequences;
  };
  struct PosPattern {
    uint32_t count = 0;
    uint32_t length = 0;
  };

  static PatternTable mine(const Corpus& corpus, size_t max_len, size_t min_support);

  size_t max_len() const { return max_len_; }
  size_t min_support() const { return min_support_; }
  const std::unordered_map<std::string, WordPattern>& word_patterns() const { return words_; }
  const std::unordered_map<std::string, PosPattern>& pos_patterns() const { return pos_; }

  // Count of a retained word pattern; unigrams report their exact count even
  // below min_support. 0 when absent.
  uint32_t count(const std::string& surface) const;
  uint32_t unigram_count(const std::string& token) const;
  const std::unordered_map<std::string, uint32_t>& unigram_counts() const { return unigram_counts_; }
  uint32_t sentence_frequency(const std::string& token) const;
  bool retained(const std::string& surface) const;
  uint64_t total_tokens() const { return total_tokens_; }
  uint64_t num_sentences() const { return num_sentences_; }

 private:
  size_t max_len_ = 0;
  size_t min_support_ = 0;
  std::unordered_map<std::string, WordPattern> words_;
  std::unordered_map<std::string, PosPattern> pos_;
  std::unordered_map<std::string, uint32_t> unigram_counts_;
  std::unordered_map<std::string, uint32_t> unigram_df_;
  uint64_t total_tokens_ = 0;
  uint64_t num_sentences_ = 0;
};

// Counts of patterns occurring as whole segments of the current
// segmentation; these replace raw frequencies in later training rounds.
struct RectifiedCounts {
  std::unordered_map<std::string, uint32_t> word_segments;
  std::unordered_map<std::string, uint32_t> pos_segments;
  std::unordered_map<std::string, uint32_t> pos_positive_segments;
};

struct QualityExamples {
  std::vector<std::string> phrase_positive;
  std::vector<std::string> phrase_negative;
  std::vector<std::string> pos_positive;
  std::vector<std::string> pos_negative;
};

// Positives: frequent word patterns matching a KB alias. Negatives: a seeded
// sample of the rest at negative_ratio per positive. The POS lists hold the
// dominant tag sequence of each example phrase (duplicates kept); negative
// phrases whose sequence is ever seen at a positive are left out. Throws Error
// when the KB matches nothing.
QualityExamples build_quality_examples(const PatternTable& patterns, const KnowledgeBase& kb, double negative_ratio,
                                       uint64_t seed);

inline constexpr int kQualityFeatureSchema = 1;
inline constexpr size_t kPhraseFeatureCount = 6;
inline constexpr size_t kPosFeatureCount = 3;

// Feature extraction for the two classifiers, bound to the corpus statistics
// and the positive-example set of the current round.
class QualityFeaturizer {
 public:
  QualityFeaturizer(const PatternTable& patterns, const std::unordered_set<std::string>& positive_phrases,
                    const RectifiedCounts* rectified = nullptr);

  // [log1p(freq), best-split NPMI, log independence ratio, stopword at
  //  boundary, mean token IDF, capitalized-token ratio]
  std::vector<double> phrase_features(const std::string& surface) const;
  // [log1p(freq), fraction of occurrences at positive word patterns, length]
  std::vector<double> pos_features(const std::string& pos_pattern) const;

 private:
  const PatternTable& patterns_;
  const RectifiedCounts* rectified_;
  std::unordered_map<std::string, uint32_t> pos_positive_counts_;
};

struct QualityModel {
  RandomForest phrase;
  RandomForest pos;
  int schema = kQualityFeatureSchema;
  double phrase_training_accuracy = 0.0;
  double pos_training_accuracy = 0.0;
};

QualityModel train_quality_models(const QualityExamples& examples, const QualityFeaturizer& featurizer,
                                  const SegmenterConfig& config);

// Equal-weight combination of the phrase and POS-pattern scores.
inline double combine_quality(double phrase_score, double pos_score) { return 0.5 * phrase_score + 0.5 * pos_score; }

// Q(c) for spans of the corpus, memoized by word and POS pattern strings.
// Multi-token spans that are not frequent patterns score 0.
class QualityScorer {
 public:
  QualityScorer(const QualityModel& model, const QualityFeaturizer& featurizer, const PatternTable& patterns)
      : model_(model), featurizer_(featurizer), patterns_(patterns) {}

  double phrase_score(const std::string& surface);
  double pos_score(const std::string& pos_pattern);
  // kNotCandidate for multi-token spans that are not retained patterns.
  double score(const Sentence& sentence, Span span);

 private:
  const QualityModel& model_;
  const QualityFeaturizer& featurizer_;
  const PatternTable& patterns_;
  std::unordered_map<std::string, double> phrase_cache_;
  std::unordered_map<std::string, double> pos_cache_;
};

// p(l) over segment lengths and p(c | l) with reserved unseen mass.
class SegmentPriors {
 public:
  SegmentPriors() = default;
  SegmentPriors(std::vector<double> length_prob, std::vector<std::unordered_map<std::string, double>> conditional,
                double epsilon_unseen);

  // Initial priors before any segmentation: uniform p(l), p(c|l) from raw
  // pattern counts among retained patterns of length l.
  static SegmentPriors from_patterns(const PatternTable& patterns, double epsilon_unseen);

  size_t max_len() const { return length_prob_.size() - 1; }
  double length_prob(size_t len) const { return length_prob_.at(len); }
  double conditional(size_t len, const std::string& surface) const;
  double epsilon() const { return epsilon_; }
  double floor_log(double p) const;

 private:
  std::vector<double> length_prob_;  // index 0 unused
  std::vector<std::unordered_map<std::string, double>> conditional_;
  double epsilon_ = 1e-6;
};

// Boundaries b_0 = 0 < b_1 < ... < b_k = n.
struct Segmentation {
  std::vector<uint32_t> boundaries;
  double log_likelihood = 0.0;

  std::vector<Span> segments() const;
};

// Exact maximizer of sum_t score(start_t, len_t) over all segmentations with
// segment length <= max_len, in O(n * max_len). Ties on the total prefer
// fewer segments, then the lexicographically longest-first length sequence.
Segmentation viterbi_segment(size_t n, size_t max_len, const std::function<double(size_t, size_t)>& segment_score);

// Quality marker for spans that may not form a segment at all.
inline constexpr double kNotCandidate = -1.0;

// Per-span quality Q for one sentence: q[start * max_len + (len - 1)].
using SpanQuality = std::vector<double>;
std::vector<SpanQuality> compute_span_quality(const Corpus& corpus, QualityScorer& scorer, size_t max_len);

// log p(l) + log p(c|l) + log Q(c), each floored at log(epsilon). Length-1
// segments carry quality factor 1: a lone token is the default reading, and
// its Q only decides admission as a mention. -inf for kNotCandidate spans.
double segment_log_score(const Sentence& sentence, Span span, double quality, const SegmentPriors& priors);

Segmentation segment_sentence(const Sentence& sentence, const SpanQuality& quality, const SegmentPriors& priors,
                              size_t max_len);
std::vector<Segmentation> segment_corpus(const Corpus& corpus, const std::vector<SpanQuality>& quality,
                                         const SegmentPriors& priors, size_t max_len, int threads = 1);

SegmentPriors estimate_priors(const Corpus& corpus, const std::vector<Segmentation>& segmentation, size_t max_len,
                              double epsilon_unseen);

// Hard-EM on a fixed quality table: segment, re-estimate, repeat. Returns the
// total log-likelihood after each segmentation pass.
std::vector<double> viterbi_training(const Corpus& corpus, const std::vector<SpanQuality>& quality,
                                     SegmentPriors& priors, size_t max_len, int rounds, double epsilon_unseen);

struct MentionSpan {
  size_t sentence = 0;  // global sentence index
  Span span;
  auto operator<=>(const MentionSpan&) const = default;
};

bool is_noun_like(const std::string& pos);

// Everything needed to segment further text the way training text was.
struct SegmenterModel {
  SegmenterConfig config;
  PatternTable patterns;
  std::unordered_set<std::string> positive_phrases;
  RectifiedCounts rectified;
  bool use_rectified = false;
  QualityModel quality;
  SegmentPriors priors;
};

struct SegmentationRun {
  SegmenterModel model;
  std::vector<Segmentation> segmentation;
  std::vector<double> log_likelihood_trace;  // one entry per round
  int rounds = 0;
  std::vector<MentionSpan> mentions;
};

// Iterates {train classifiers, segment, re-estimate priors, rectify counts}
// until the relative log-likelihood change falls below seg_tol or max_rounds.
SegmentationRun run_segmentation(const Corpus& corpus, const KnowledgeBase& kb, const SegmenterConfig& config);

// Mentions from a segmentation: every multi-token segment, plus single noun
// tokens with Q >= q_min.
std::vector<MentionSpan> extract_mentions(const Corpus& corpus, const std::vector<Segmentation>& segmentation,
                                          const std::vector<SpanQuality>& quality, size_t max_len, double q_min);

// Applies a trained segmenter to another corpus (e.g. held-out text).
std::vector<MentionSpan> detect_mentions(const SegmenterModel& model, const Corpus& corpus);

// TSV `doc_id<TAB>sentence_index<TAB>start<TAB>end<TAB>surface`.
std::string format_mentions(const Corpus& corpus, const std::vector<MentionSpan>& mentions);
std::vector<MentionSpan> parse_mentions(const std::string& content, const Corpus& corpus,
                                        const std::string& source = "<mentions>");

}  // namespace cotype

#endif  // COTYPE_SEGMENTER_H_
