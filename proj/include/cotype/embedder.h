#ifndef COTYPE_EMBEDDER_H_
#define COTYPE_EMBEDDER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cotype/alias_table.h"
#include "cotype/features.h"
#include "cotype/kb.h"
#include "cotype/labeler.h"
#include "cotype/util.h"

namespace cotype {

// Row-major dense matrix of d-vectors.
class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  double* row(size_t i) { return data_.data() + i * cols_; }
  const double* row(size_t i) const { return data_.data() + i * cols_; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> data_;
};

enum class SpaceKind { kRelation, kEntity };
const char* space_name(SpaceKind space);

struct SpaceVectors {
  Matrix mentions;
  Matrix features;
  Matrix types;
  std::vector<std::string> feature_names;
  std::vector<std::string> type_names;
};

struct EmbeddingModel {
  size_t dim = 0;
  SpaceVectors relation;
  SpaceVectors entity;

  SpaceVectors& space(SpaceKind s) { return s == SpaceKind::kRelation ? relation : entity; }
  const SpaceVectors& space(SpaceKind s) const { return s == SpaceKind::kRelation ? relation : entity; }
};

// Text format: header `COTYPE v1 d=<d> spaces=2`, then
// `<space>:<kind>:<name> <d floats>` per vector. Mention vectors are written
// only when requested.
std::string serialize_model(const EmbeddingModel& model, bool include_mentions = false);
EmbeddingModel parse_model(const std::string& content, const std::string& source = "<model>");

struct SpaceGraph {
  size_t num_mentions = 0;
  size_t num_features = 0;
  size_t num_types = 0;
  std::vector<uint32_t> edge_mention;
  std::vector<uint32_t> edge_feature;
  std::vector<double> edge_weight;
  std::vector<std::vector<TypeId>> candidates;  // sorted, per mention
  std::vector<uint32_t> trainable;              // mentions with features and candidates
  std::vector<double> noise_weight;             // D_f^{3/4}
  AliasTable edge_sampler;
  AliasTable noise_sampler;
  std::vector<std::string> feature_names;
  std::vector<std::string> type_names;
};

// Builds edges, candidate sets and samplers for one space. Mentions flagged
// empty get no edges and are not trainable.
SpaceGraph build_space_graph(const std::vector<FeatureVector>& vectors, std::vector<std::vector<TypeId>> candidates,
                             const std::vector<uint32_t>& document_frequency, size_t num_types);

struct Triple {
  uint32_t z = 0;
  uint32_t m1 = 0;
  uint32_t m2 = 0;
};

struct TrainingGraph {
  SpaceGraph relation;
  SpaceGraph entity;
  std::vector<Triple> triples;          // Z_L mentions with both arguments in the entity space
  std::vector<uint32_t> z_corruptions;  // replacement pool for the relation slot
  std::vector<uint32_t> m_corruptions;  // replacement pool for an argument slot (M_L)
};

TrainingGraph build_training_graph(const LabeledCorpus& dl, const FeaturizedCorpus& features,
                                   const TypeHierarchy& hierarchy);

// Coordinates i.i.d. uniform on [-0.5/d, 0.5/d]. Throws Error when the graph
// carries no edges.
EmbeddingModel init_model(const TrainingGraph& graph, size_t dim, uint64_t seed);

double sigmoid(double x);
double dot(const double* a, const double* b, size_t d);
double squared_norm(const double* a, size_t d);

// Negated log-likelihood of one mention-feature edge with its negatives:
// -[log s(u.c) + sum_v log s(-u.c_v)].
double second_order_loss(const double* u, const double* c, std::span<const double* const> negatives, size_t d);
// One descent step on second_order_loss, gradients taken at the current point.
void step_second_order(double* u, double* c, std::span<double* const> negatives, size_t d, double alpha);

struct PartialLabelResult {
  double loss = 0.0;
  TypeId best_candidate = -1;
  TypeId best_noncandidate = -1;  // -1 when every type is a candidate
};

// max{0, 1 - [max_{r in R} u.r - max_{r' not in R} u.r']}; ties go to the
// lowest type id. An empty non-candidate set gives loss 0.
PartialLabelResult partial_label_loss(const double* u, const Matrix& types, std::span<const TypeId> candidates);
// Loss plus lambda/2 times the squared norms of u and the two argmax types.
double partial_label_objective(const double* u, const Matrix& types, std::span<const TypeId> candidates,
                               double lambda);
void step_partial_label(double* u, Matrix& types, std::span<const TypeId> candidates, double alpha, double lambda);

// Treat-all-candidates-as-true variant: one hinge per candidate against the
// best non-candidate.
double per_candidate_loss(const double* u, const Matrix& types, std::span<const TypeId> candidates);
double per_candidate_objective(const double* u, const Matrix& types, std::span<const TypeId> candidates,
                               double lambda);
void step_per_candidate(double* u, Matrix& types, std::span<const TypeId> candidates, double alpha, double lambda);

// ||m1 + z - m2||^2
double translation_error(const double* z, const double* m1, const double* m2, size_t d);

struct TripleRef {
  double* z;
  double* m1;
  double* m2;
};
// max{0, margin + tau(pos) - tau(neg)}
double translation_loss(const TripleRef& pos, const TripleRef& neg, size_t d, double margin);
// One descent step on translation_loss. Slots of pos and neg may alias; their
// gradient contributions add. With update_entities false only z vectors move.
void step_translation(const TripleRef& pos, const TripleRef& neg, size_t d, double alpha, double margin,
                      bool update_entities = true);

enum class LabelLoss { kPartial, kPerCandidate };

struct ObjectiveValue {
  double o_z = 0.0;
  double o_m = 0.0;
  double o_zm = 0.0;
  double total() const { return o_z + o_m + o_zm; }
};

enum class ObjectiveMode { kFull, kSampled };

struct ObjectiveOptions {
  int negatives = 5;
  double lambda = 1e-4;
  double margin = 1.0;
  LabelLoss label_loss = LabelLoss::kPartial;
  ObjectiveMode mode = ObjectiveMode::kFull;
  double sample_fraction = 0.1;
  uint64_t seed = 0x5eed;
};

// Expectations over negatives are estimated with draws from a fixed seed, so
// the value is a deterministic function of the model.
ObjectiveValue compute_objective(const EmbeddingModel& model, const TrainingGraph& graph,
                                 const ObjectiveOptions& options);

// Corrupts one of the three slots chosen uniformly, replacing it from the
// matching pool. Returns the slot (0 = z, 1 = m1, 2 = m2), or -1 when the
// replacement kept equal to the original after a few redraws.
int corrupt_triple(const Triple& t, const TrainingGraph& graph, Rng& rng, Triple& out);

}  // namespace cotype

#endif  // COTYPE_EMBEDDER_H_
