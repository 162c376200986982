#ifndef COTYPE_EVALUATION_H_
#define COTYPE_EVALUATION_H_

#include <array>
#include <map>
#include <string>
#include <vector>

#include "cotype/corpus.h"
#include "cotype/inference.h"
#include "cotype/kb.h"

namespace cotype {

// Mention-level annotations shared by gold files and predictions. Gold
// records carry no score.
struct EntityAnnotation {
  std::string doc;
  uint32_t sentence = 0;
  Span span;
  std::vector<std::string> types;  // empty means None
  std::string best_type;
  double score = 1.0;
};

struct RelationAnnotation {
  std::string doc;
  uint32_t sentence = 0;
  Span em1;
  Span em2;
  std::string type;  // "None" when no target relation
  std::string best_type;
  double score = 1.0;
};

struct Annotations {
  std::vector<EntityAnnotation> entities;
  std::vector<RelationAnnotation> relations;
};

Annotations parse_annotations(const std::string& content, const std::string& source = "<annotations>");
std::string format_annotations(const Annotations& a);
Annotations to_annotations(const Predictions& p, const Corpus& corpus, const TypeHierarchy& hierarchy);

struct PRF {
  double precision = 1.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Precision is 1 when nothing is predicted.
PRF make_prf(double tp_precision, double num_predicted, double tp_recall, double num_gold);

struct EntityTypingScores {
  PRF strict;
  PRF macro;
  PRF micro;
  std::map<std::string, std::array<size_t, 3>> per_type;  // tp, fp, fn
  size_t gold_mentions = 0;
  size_t predicted_mentions = 0;
};

// Strict, loose-macro and loose-micro scores over mentions keyed by exact
// span. A prediction with an empty type set is not a predicted mention.
// Throws InputError on empty gold.
EntityTypingScores entity_typing_scores(const std::vector<EntityAnnotation>& gold,
                                        const std::vector<EntityAnnotation>& predicted);

// Fraction of gold non-None relation mentions whose predicted type matches;
// a missing prediction counts as wrong.
double relation_classification_accuracy(const std::vector<RelationAnnotation>& gold,
                                        const std::vector<RelationAnnotation>& predicted);

struct CurvePoint {
  double threshold = 0.0;
  size_t true_positives = 0;
  size_t predicted = 0;
  PRF prf;
};

struct RelationExtractionScores {
  PRF at_default;  // using each prediction's own type
  size_t true_positives = 0;
  size_t predicted = 0;
  size_t gold = 0;
  std::vector<CurvePoint> curve;
  CurvePoint best;  // highest F1 on the curve
};

std::vector<double> default_threshold_grid();

// A predicted (span pair, type) is correct iff an identical non-None gold
// record exists. The sweep re-thresholds best_type at each grid value.
RelationExtractionScores relation_extraction_prf(const std::vector<RelationAnnotation>& gold,
                                                 const std::vector<RelationAnnotation>& predicted,
                                                 const std::vector<double>& thresholds = default_threshold_grid());

// `threshold<TAB>precision<TAB>recall`
std::string format_curve(const std::vector<CurvePoint>& curve);

struct MetricsReport {
  EntityTypingScores entity;
  bool has_entity = false;
  double relation_accuracy = 0.0;
  RelationExtractionScores relation;
};

MetricsReport evaluate(const Annotations& gold, const Annotations& predicted);
std::string metrics_json(const MetricsReport& report);

}  // namespace cotype

#endif  // COTYPE_EVALUATION_H_
