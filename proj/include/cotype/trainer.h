#ifndef COTYPE_TRAINER_H_
#define COTYPE_TRAINER_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "cotype/embedder.h"

namespace cotype {

enum class Schedule {
  kJoint,     // O_Z, O_M and O_ZM sampled in turn
  kTwoStage,  // O_M alone, then O_Z + O_ZM with the entity space frozen
};

struct TrainConfig {
  size_t dim = 50;
  int negatives = 5;
  double lambda = 1e-4;
  double alpha = 0.025;
  double margin = 1.0;
  // 0 picks iters_per_edge times the larger edge count of the two spaces.
  uint64_t max_iters = 0;
  double iters_per_edge = 10.0;
  double convergence_tol = 1e-4;
  // 0 checks once per pass over the larger edge set.
  uint64_t objective_check_every = 0;
  ObjectiveMode objective_mode = ObjectiveMode::kSampled;
  bool linear_decay = false;
  LabelLoss label_loss = LabelLoss::kPartial;
  Schedule schedule = Schedule::kJoint;
  uint64_t seed = 1;
  int threads = 1;
};

void validate(const TrainConfig& config);

struct TrainStats {
  uint64_t iterations = 0;
  bool converged = false;
  double seconds = 0.0;
  std::vector<std::pair<uint64_t, ObjectiveValue>> trace;
};

uint64_t resolve_max_iters(const TrainingGraph& graph, const TrainConfig& config);

// Stochastic sub-gradient descent with edge sampling. Deterministic for a
// fixed seed when threads == 1; more threads update shared vectors without
// locks.
EmbeddingModel train(const TrainingGraph& graph, const TrainConfig& config, TrainStats* stats = nullptr);

}  // namespace cotype

#endif  // COTYPE_TRAINER_H_
