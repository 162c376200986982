#ifndef COTYPE_FEATURES_H_
#define COTYPE_FEATURES_H_

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cotype/corpus.h"
#include "cotype/labeler.h"

namespace cotype {

// token -> bit string, from a `token<TAB>bitstring` file.
using BrownClusters = std::unordered_map<std::string, std::string>;
BrownClusters load_brown_clusters(const std::string& path);

inline constexpr size_t kBrownPrefixes[] = {4, 8};

struct FeatureOptions {
  size_t window = 3;
  const BrownClusters* brown = nullptr;
};

// Head of a mention: its last token.
size_t head_index(Span span);

// Word shape of a token: A for upper, a for lower, 0 for digit, other
// characters kept.
std::string word_shape(const std::string& token);

std::vector<std::string> extract_relation_features(const Sentence& sentence, Span em1, Span em2,
                                                   const FeatureOptions& options = {});
std::vector<std::string> extract_entity_features(const Sentence& sentence, Span mention,
                                                 const FeatureOptions& options = {});

// EM1_TYPE_x / EM2_TYPE_x features for the entity-type injection study.
std::vector<std::string> entity_type_features(int argument, const std::vector<std::string>& type_names);

// Sparse feature vector: (feature id, occurrence count), ascending ids.
using FeatureVector = std::vector<std::pair<uint32_t, uint32_t>>;

class FeatureDictionary {
 public:
  // Keeps features seen with at least min_count distinct mentions; ids follow
  // lexicographic order of the feature strings. Throws Error when nothing
  // survives.
  static FeatureDictionary build(const std::vector<std::vector<std::string>>& mention_features, uint32_t min_count);

  size_t size() const { return names_.size(); }
  const std::string& name(uint32_t id) const { return names_.at(id); }
  uint32_t document_frequency(uint32_t id) const { return df_.at(id); }
  const std::vector<uint32_t>& document_frequencies() const { return df_; }
  uint32_t min_count() const { return min_count_; }
  const uint32_t* find(const std::string& feature) const;

  FeatureVector featurize(const std::vector<std::string>& features) const;

  // `feature_id<TAB>string<TAB>D_f`
  std::string serialize() const;
  static FeatureDictionary parse(const std::string& content, const std::string& source = "<dictionary>");

 private:
  std::vector<std::string> names_;
  std::vector<uint32_t> df_;
  std::unordered_map<std::string, uint32_t> index_;
  uint32_t min_count_ = 1;
};

struct FeatureConfig {
  uint32_t min_count = 2;
  size_t window = 3;
  std::string brown_path;
};

// Per-space training features. Relation-space mention i is the i-th entry of
// D_L relations followed by the None relations; entity-space mention i is the
// i-th of the linked entity mentions followed by the None entity mentions.
struct SpaceFeatures {
  FeatureDictionary dictionary;
  std::vector<FeatureVector> vectors;
  std::vector<bool> empty;  // all features pruned; excluded from training
};

struct FeaturizedCorpus {
  SpaceFeatures relation;
  SpaceFeatures entity;
};

// Relation mention order and entity mention order used by the spaces.
std::vector<const RelationMention*> relation_training_order(const LabeledCorpus& dl);
std::vector<uint32_t> entity_training_order(const LabeledCorpus& dl);

// Optional per-mention type-name lists appended as EM1_TYPE_/EM2_TYPE_
// features (indexed by entity mention id).
using EntityTypeInjection = std::vector<std::vector<std::string>>;

std::vector<std::string> relation_mention_features(const Corpus& corpus, const LabeledCorpus& dl,
                                                   const RelationMention& rm, const FeatureOptions& options,
                                                   const EntityTypeInjection* injection = nullptr);

FeaturizedCorpus featurize_corpus(const Corpus& corpus, const LabeledCorpus& dl, const FeatureConfig& config,
                                  const BrownClusters* brown = nullptr, const EntityTypeInjection* injection = nullptr,
                                  int threads = 1);

// `mention_id<TAB>feature_id<TAB>weight`
std::string format_edges(const std::vector<FeatureVector>& vectors);
std::vector<FeatureVector> parse_edges(const std::string& content, size_t num_mentions, size_t num_features,
                                       const std::string& source = "<edges>");

}  // namespace cotype

#endif  // COTYPE_FEATURES_H_
