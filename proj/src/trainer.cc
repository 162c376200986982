#include "cotype/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <thread>

namespace cotype {

void validate(const TrainConfig& c) {
  if (c.dim < 1) throw InputError("train: d must be >= 1");
  if (c.negatives < 1) throw InputError("train: V must be >= 1");
  if (!(c.lambda >= 0.0)) throw InputError("train: lambda must be >= 0");
  if (!(c.alpha > 0.0)) throw InputError("train: alpha must be > 0");
  if (c.threads < 1) throw InputError("train: threads must be >= 1");
}

uint64_t resolve_max_iters(const TrainingGraph& graph, const TrainConfig& config) {
  if (config.max_iters > 0) return config.max_iters;
  const size_t edges = std::max(graph.relation.edge_weight.size(), graph.entity.edge_weight.size());
  return std::max<uint64_t>(1000, static_cast<uint64_t>(config.iters_per_edge * static_cast<double>(edges)));
}

namespace {

struct Worker {
  const TrainingGraph& graph;
  EmbeddingModel& model;
  const TrainConfig& config;
  Rng rng;
  std::vector<double*> negs;

  Worker(const TrainingGraph& g, EmbeddingModel& m, const TrainConfig& c, uint64_t seed)
      : graph(g), model(m), config(c), rng(seed), negs(static_cast<size_t>(c.negatives)) {}

  void space_step(SpaceKind s, double alpha) {
    const SpaceGraph& g = s == SpaceKind::kRelation ? graph.relation : graph.entity;
    SpaceVectors& sv = model.space(s);
    const size_t d = model.dim;
    if (!g.edge_sampler.empty()) {
      const size_t e = g.edge_sampler.sample(rng);
      for (auto& p : negs) p = sv.features.row(g.noise_sampler.sample(rng));
      step_second_order(sv.mentions.row(g.edge_mention[e]), sv.features.row(g.edge_feature[e]), negs, d, alpha);
    }
    if (!g.trainable.empty()) {
      const uint32_t i = g.trainable[rng.uniform_index(g.trainable.size())];
      if (config.label_loss == LabelLoss::kPartial) {
        step_partial_label(sv.mentions.row(i), sv.types, g.candidates[i], alpha, config.lambda);
      } else {
        step_per_candidate(sv.mentions.row(i), sv.types, g.candidates[i], alpha, config.lambda);
      }
    }
  }

  void triple_step(double alpha, bool update_entities) {
    if (graph.triples.empty()) return;
    const Triple& t = graph.triples[rng.uniform_index(graph.triples.size())];
    Matrix& z = model.relation.mentions;
    Matrix& m = model.entity.mentions;
    const TripleRef pos{z.row(t.z), m.row(t.m1), m.row(t.m2)};
    for (int v = 0; v < config.negatives; ++v) {
      Triple c;
      if (corrupt_triple(t, graph, rng, c) < 0) continue;
      step_translation(pos, {z.row(c.z), m.row(c.m1), m.row(c.m2)}, model.dim, alpha, config.margin,
                       update_entities);
    }
  }

  void run(uint64_t begin, uint64_t end, uint64_t total, int stage) {
    for (uint64_t it = begin; it < end; ++it) {
      double alpha = config.alpha;
      if (config.linear_decay) alpha *= std::max(1e-4, 1.0 - static_cast<double>(it) / static_cast<double>(total));
      if (stage != 2) space_step(SpaceKind::kEntity, alpha);
      if (stage != 1) {
        space_step(SpaceKind::kRelation, alpha);
        triple_step(alpha, stage == 0);
      }
    }
  }
};

void check_finite(const EmbeddingModel& model, uint64_t iteration) {
  for (SpaceKind s : {SpaceKind::kRelation, SpaceKind::kEntity}) {
    const SpaceVectors& sv = model.space(s);
    const std::pair<const char*, const Matrix*> mats[] = {
        {"mention", &sv.mentions}, {"feature", &sv.features}, {"type", &sv.types}};
    for (const auto& [kind, mat] : mats) {
      const auto& data = mat->data();
      for (size_t i = 0; i < data.size(); ++i) {
        if (!std::isfinite(data[i])) {
          throw Error(std::string("non-finite coordinate in ") + space_name(s) + " " + kind + " row " +
                      std::to_string(i / model.dim) + " at iteration " + std::to_string(iteration) +
                      "; try a smaller alpha");
        }
      }
    }
  }
}

// Objective restricted to the terms a stage optimizes.
double stage_objective(const ObjectiveValue& v, int stage) {
  if (stage == 1) return v.o_m;
  if (stage == 2) return v.o_z + v.o_zm;
  return v.total();
}

}  // namespace

EmbeddingModel train(const TrainingGraph& graph, const TrainConfig& config, TrainStats* stats) {
  validate(config);
  const auto t0 = std::chrono::steady_clock::now();
  EmbeddingModel model = init_model(graph, config.dim, config.seed);
  const uint64_t max_iters = resolve_max_iters(graph, config);
  const size_t edges = std::max(graph.relation.edge_weight.size(), graph.entity.edge_weight.size());
  const uint64_t check_every =
      config.objective_check_every > 0 ? config.objective_check_every : std::max<uint64_t>(1000, edges);

  ObjectiveOptions oo;
  oo.negatives = config.negatives;
  oo.lambda = config.lambda;
  oo.margin = config.margin;
  oo.label_loss = config.label_loss;
  oo.mode = config.objective_mode;
  oo.seed = mix_seed(config.seed, 0x0b1ec7);

  TrainStats local;
  TrainStats& st = stats ? *stats : local;
  st = TrainStats{};
  const std::vector<int> stages = config.schedule == Schedule::kJoint ? std::vector<int>{0} : std::vector<int>{1, 2};
  Worker serial(graph, model, config, mix_seed(config.seed, 0x7a1));
  bool all_converged = true;
  for (int stage : stages) {
    double previous = NAN;
    bool converged = false;
    uint64_t it = 0;
    uint64_t chunk_index = 0;
    while (it < max_iters) {
      const uint64_t end = std::min(max_iters, it + check_every);
      if (config.threads <= 1) {
        serial.run(it, end, max_iters, stage);
      } else {
        std::vector<std::thread> pool;
        const uint64_t n = end - it;
        for (int t = 0; t < config.threads; ++t) {
          const uint64_t b = it + n * static_cast<uint64_t>(t) / static_cast<uint64_t>(config.threads);
          const uint64_t e = it + n * static_cast<uint64_t>(t + 1) / static_cast<uint64_t>(config.threads);
          const uint64_t seed = mix_seed(config.seed, (chunk_index << 8) + static_cast<uint64_t>(t) + 1);
          pool.emplace_back([&, b, e, seed] { Worker(graph, model, config, seed).run(b, e, max_iters, stage); });
        }
        for (auto& th : pool) th.join();
      }
      ++chunk_index;
      it = end;
      check_finite(model, it);
      const ObjectiveValue v = compute_objective(model, graph, oo);
      st.trace.emplace_back(it, v);
      const double o = stage_objective(v, stage);
      if (!std::isfinite(o)) throw Error("objective became non-finite at iteration " + std::to_string(it));
      if (std::isfinite(previous) && std::abs(o - previous) <= config.convergence_tol * std::abs(previous)) {
        converged = true;
        break;
      }
      previous = o;
    }
    st.iterations += it;
    all_converged = all_converged && converged;
  }
  st.converged = all_converged;
  st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return model;
}

}  // namespace cotype
