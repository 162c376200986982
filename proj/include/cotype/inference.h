#ifndef COTYPE_INFERENCE_H_
#define COTYPE_INFERENCE_H_

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cotype/corpus.h"
#include "cotype/embedder.h"
#include "cotype/features.h"
#include "cotype/kb.h"
#include "cotype/segmenter.h"

namespace cotype {

struct InferenceConfig {
  double eta = 0.35;
  std::optional<double> eta_relation;
  std::optional<double> eta_entity;
  bool include_none_relation = false;

  double relation_threshold() const { return eta_relation.value_or(eta); }
  double entity_threshold() const { return eta_entity.value_or(eta); }
};

double cosine(const double* a, const double* b, size_t d);

// Feature lookup for one space of a trained model.
class FeatureIndex {
 public:
  explicit FeatureIndex(const SpaceVectors& space);
  const double* find(const std::string& feature) const;

 private:
  const SpaceVectors& space_;
  std::unordered_map<std::string, size_t> index_;
};

struct MentionEmbedding {
  std::vector<double> vec;
  size_t num_features = 0;  // retained features summed
  bool zero() const { return num_features == 0; }
};

// Sum of the vectors of known features, one term per occurrence.
MentionEmbedding embed_mention(const std::vector<std::string>& features, const FeatureIndex& index, size_t dim);

struct RelationPrediction {
  TypeId type = -1;       // None type id when below threshold
  TypeId best_type = -1;  // argmax before thresholding; -1 for a zero vector
  double score = -1.0;    // cosine of best_type
};

// Nearest relation type by cosine; the None vector is skipped unless enabled.
RelationPrediction predict_relation_type(const MentionEmbedding& z, const EmbeddingModel& model,
                                         const TypeHierarchy& hierarchy, const InferenceConfig& config);

struct EntityPrediction {
  std::vector<TypeId> path;  // top-level type first; empty means None
  TypeId best_top = -1;
  double score = -1.0;  // cosine of the best top-level type
};

// Greedy top-down descent: at each level take the child with the highest
// cosine and accept it iff the cosine is at least eta.
EntityPrediction predict_entity_typepath(const MentionEmbedding& m, const EmbeddingModel& model,
                                         const TypeHierarchy& hierarchy, const InferenceConfig& config);

// Checks that the model's type vectors line up with the hierarchy ids.
void check_model_types(const EmbeddingModel& model, const TypeHierarchy& hierarchy);

struct EntityPredictionRecord {
  size_t sentence = 0;
  Span span;
  EntityPrediction prediction;
};

struct RelationPredictionRecord {
  size_t sentence = 0;
  size_t arg1 = 0;  // indices into the entity records
  size_t arg2 = 0;
  RelationPrediction prediction;
};

struct Predictions {
  std::vector<EntityPredictionRecord> entities;
  std::vector<RelationPredictionRecord> relations;
};

// Types every mention and every ordered pair of non-overlapping mentions in a
// sentence. Records follow (sentence, span) order.
Predictions batch_predict(const Corpus& corpus, std::vector<MentionSpan> mentions, const EmbeddingModel& model,
                          const TypeHierarchy& hierarchy, const InferenceConfig& config,
                          const FeatureOptions& features = {}, int threads = 1,
                          const std::vector<std::vector<std::string>>* injected_types = nullptr);

// JSON lines, one record per entity mention ("kind":"entity") and per
// relation mention ("kind":"relation").
std::string format_predictions(const Predictions& p, const Corpus& corpus, const TypeHierarchy& hierarchy);

}  // namespace cotype

#endif  // COTYPE_INFERENCE_H_
