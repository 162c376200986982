#ifndef COTYPE_PIPELINE_H_
#define COTYPE_PIPELINE_H_

#include <optional>
#include <string>
#include <vector>

#include "cotype/config.h"
#include "cotype/corpus.h"
#include "cotype/embedder.h"
#include "cotype/evaluation.h"
#include "cotype/inference.h"
#include "cotype/kb.h"
#include "cotype/labeler.h"
#include "cotype/segmenter.h"
#include "cotype/trainer.h"

namespace cotype {

struct PipelineInputs {
  const Corpus* train = nullptr;
  const KnowledgeBase* kb = nullptr;
  const Corpus* test = nullptr;          // optional
  const Annotations* test_gold = nullptr;  // optional
  const BrownClusters* brown = nullptr;    // optional
  bool gold_mentions = false;  // type the gold test spans instead of detected ones
};

struct PipelineResult {
  SegmentationRun segmentation;
  LabeledCorpus labeled;
  FeaturizedCorpus features;
  TrainingGraph graph;
  EmbeddingModel model;
  TrainStats train_stats;
  std::vector<MentionSpan> test_mentions;
  std::optional<Predictions> predictions;
  std::optional<MetricsReport> metrics;
  double seconds_segment = 0.0;
  double seconds_label = 0.0;
  double seconds_features = 0.0;
  double seconds_train = 0.0;
  double seconds_predict = 0.0;
};

// Mention spans of gold entity annotations, resolved against the corpus.
std::vector<MentionSpan> gold_mention_spans(const Annotations& gold, const Corpus& corpus);

// Segment, label, featurize, train and, when a test corpus is given, predict
// and evaluate. Entity typing and end-to-end extraction are scored on the
// typed mentions; relation classification accuracy always on gold spans.
PipelineResult run_pipeline(const PipelineInputs& inputs, const RunConfig& config);

// Trains on an existing D_L and returns relation classification accuracy on
// the gold test spans.
struct StudyRow {
  std::string mode;
  double accuracy = 0.0;
};

// Relation classification accuracy with entity types injected as features:
// none, predicted by the base model, or gold (KB types for training
// mentions, gold annotations for test mentions).
std::vector<StudyRow> error_propagation_study(const PipelineInputs& inputs, const PipelineResult& base,
                                              const RunConfig& config);
std::string format_study(const std::vector<StudyRow>& rows);

}  // namespace cotype

#endif  // COTYPE_PIPELINE_H_
