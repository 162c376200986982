#include "cotype/embedder.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace cotype {

const char* space_name(SpaceKind space) { return space == SpaceKind::kRelation ? "relation" : "entity"; }

namespace {

void append_vector(std::string& out, const std::string& prefix, const double* v, size_t d) {
  out += prefix;
  char buf[32];
  for (size_t k = 0; k < d; ++k) {
    const int n = std::snprintf(buf, sizeof(buf), " %.17g", v[k]);
    out.append(buf, static_cast<size_t>(n));
  }
  out += '\n';
}

}  // namespace

std::string serialize_model(const EmbeddingModel& model, bool include_mentions) {
  std::string out = "COTYPE v1 d=" + std::to_string(model.dim) + " spaces=2\n";
  for (SpaceKind s : {SpaceKind::kRelation, SpaceKind::kEntity}) {
    const SpaceVectors& sv = model.space(s);
    const std::string name = space_name(s);
    for (size_t i = 0; i < sv.types.rows(); ++i) {
      append_vector(out, name + ":type:" + sv.type_names[i], sv.types.row(i), model.dim);
    }
    for (size_t i = 0; i < sv.features.rows(); ++i) {
      append_vector(out, name + ":feature:" + sv.feature_names[i], sv.features.row(i), model.dim);
    }
    if (include_mentions) {
      for (size_t i = 0; i < sv.mentions.rows(); ++i) {
        append_vector(out, name + ":mention:" + std::to_string(i), sv.mentions.row(i), model.dim);
      }
    }
  }
  return out;
}

EmbeddingModel parse_model(const std::string& content, const std::string& source) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line)) throw InputError(source + ": empty model file");
  EmbeddingModel model;
  {
    unsigned long d = 0;
    int spaces = 0;
    if (std::sscanf(line.c_str(), "COTYPE v1 d=%lu spaces=%d", &d, &spaces) != 2 || d == 0 || spaces != 2) {
      throw InputError(source + ": bad model header");
    }
    model.dim = d;
  }
  const size_t d = model.dim;
  struct Pending {
    std::vector<std::string> names;
    std::vector<double> values;
  };
  Pending pending[2][3];  // [space][type, feature, mention]
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    // The trailing d fields are the coordinates; the name may contain spaces.
    size_t end = line.size();
    std::vector<double> values(d);
    for (size_t k = d; k-- > 0;) {
      const size_t sp = line.rfind(' ', end - 1);
      if (sp == std::string::npos || end == 0) throw InputError(where + ": too few coordinates");
      const char* first = line.data() + sp + 1;
      const char* last = line.data() + end;
      char* parsed = nullptr;
      values[k] = std::strtod(std::string(first, last).c_str(), &parsed);
      if (first == last || !std::isfinite(values[k])) throw InputError(where + ": bad coordinate");
      end = sp;
    }
    const std::string key = line.substr(0, end);
    const size_t c1 = key.find(':');
    const size_t c2 = c1 == std::string::npos ? c1 : key.find(':', c1 + 1);
    if (c2 == std::string::npos) throw InputError(where + ": expected <space>:<kind>:<name>");
    const std::string space = key.substr(0, c1);
    const std::string kind = key.substr(c1 + 1, c2 - c1 - 1);
    int si = space == "relation" ? 0 : space == "entity" ? 1 : -1;
    int ki = kind == "type" ? 0 : kind == "feature" ? 1 : kind == "mention" ? 2 : -1;
    if (si < 0 || ki < 0) throw InputError(where + ": unknown space or kind in '" + key + "'");
    pending[si][ki].names.push_back(key.substr(c2 + 1));
    pending[si][ki].values.insert(pending[si][ki].values.end(), values.begin(), values.end());
  }
  for (int si = 0; si < 2; ++si) {
    SpaceVectors& sv = model.space(si == 0 ? SpaceKind::kRelation : SpaceKind::kEntity);
    Matrix* mats[3] = {&sv.types, &sv.features, &sv.mentions};
    for (int ki = 0; ki < 3; ++ki) {
      *mats[ki] = Matrix(pending[si][ki].names.size(), d);
      mats[ki]->data() = std::move(pending[si][ki].values);
    }
    sv.type_names = std::move(pending[si][0].names);
    sv.feature_names = std::move(pending[si][1].names);
    if (sv.types.rows() == 0) throw InputError(source + ": model has no type vectors");
  }
  return model;
}

SpaceGraph build_space_graph(const std::vector<FeatureVector>& vectors, std::vector<std::vector<TypeId>> candidates,
                             const std::vector<uint32_t>& document_frequency, size_t num_types) {
  if (vectors.size() != candidates.size()) throw Error("space graph: mention and candidate counts differ");
  SpaceGraph g;
  g.num_mentions = vectors.size();
  g.num_features = document_frequency.size();
  g.num_types = num_types;
  for (auto& c : candidates) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  for (size_t i = 0; i < vectors.size(); ++i) {
    for (const auto& [f, w] : vectors[i]) {
      if (f >= g.num_features) throw Error("space graph: feature id out of range");
      g.edge_mention.push_back(static_cast<uint32_t>(i));
      g.edge_feature.push_back(f);
      g.edge_weight.push_back(static_cast<double>(w));
    }
    if (!vectors[i].empty() && !candidates[i].empty()) g.trainable.push_back(static_cast<uint32_t>(i));
  }
  g.candidates = std::move(candidates);
  g.noise_weight.resize(g.num_features);
  for (size_t f = 0; f < g.num_features; ++f) g.noise_weight[f] = std::pow(static_cast<double>(document_frequency[f]), 0.75);
  if (!g.edge_weight.empty()) g.edge_sampler = AliasTable(g.edge_weight);
  if (!g.noise_weight.empty()) g.noise_sampler = AliasTable(g.noise_weight);
  return g;
}

TrainingGraph build_training_graph(const LabeledCorpus& dl, const FeaturizedCorpus& features,
                                   const TypeHierarchy& hierarchy) {
  TrainingGraph g;
  const auto rel_order = relation_training_order(dl);
  std::vector<std::vector<TypeId>> rel_candidates;
  for (const auto* r : rel_order) rel_candidates.push_back(r->types);
  g.relation = build_space_graph(features.relation.vectors, std::move(rel_candidates),
                                 features.relation.dictionary.document_frequencies(), hierarchy.num_relation_types());

  const auto ent_order = entity_training_order(dl);
  std::vector<std::vector<TypeId>> ent_candidates;
  std::vector<int64_t> entity_slot(dl.mentions.size(), -1);
  for (size_t i = 0; i < ent_order.size(); ++i) {
    ent_candidates.push_back(dl.mentions.at(ent_order[i]).types);
    entity_slot[ent_order[i]] = static_cast<int64_t>(i);
  }
  g.entity = build_space_graph(features.entity.vectors, std::move(ent_candidates),
                               features.entity.dictionary.document_frequencies(), hierarchy.num_entity_types());

  auto names = [](const FeatureDictionary& dict) {
    std::vector<std::string> out;
    for (uint32_t i = 0; i < dict.size(); ++i) out.push_back(dict.name(i));
    return out;
  };
  g.relation.feature_names = names(features.relation.dictionary);
  g.entity.feature_names = names(features.entity.dictionary);
  for (size_t t = 0; t < hierarchy.num_relation_types(); ++t) {
    g.relation.type_names.push_back(hierarchy.relation_type_name(static_cast<TypeId>(t)));
  }
  for (size_t t = 0; t < hierarchy.num_entity_types(); ++t) {
    g.entity.type_names.push_back(hierarchy.entity_type_name(static_cast<TypeId>(t)));
  }

  std::vector<bool> m_usable(g.entity.num_mentions, false);
  for (uint32_t i : g.entity.trainable) m_usable[i] = true;
  // Z_L occupies the first dl.relations.size() slots of the relation space.
  for (size_t i = 0; i < dl.relations.size(); ++i) {
    if (features.relation.empty[i] || g.relation.candidates[i].empty()) continue;
    const int64_t a = entity_slot[dl.relations[i].arg1];
    const int64_t b = entity_slot[dl.relations[i].arg2];
    if (a < 0 || b < 0 || !m_usable[static_cast<size_t>(a)] || !m_usable[static_cast<size_t>(b)]) continue;
    g.triples.push_back({static_cast<uint32_t>(i), static_cast<uint32_t>(a), static_cast<uint32_t>(b)});
    g.z_corruptions.push_back(static_cast<uint32_t>(i));
  }
  for (size_t i = 0; i < dl.linked_entities.size(); ++i) {
    if (m_usable[i]) g.m_corruptions.push_back(static_cast<uint32_t>(i));
  }
  return g;
}

EmbeddingModel init_model(const TrainingGraph& graph, size_t dim, uint64_t seed) {
  if (dim == 0) throw InputError("embedding dimension must be positive");
  if (graph.relation.edge_weight.empty() && graph.entity.edge_weight.empty()) throw Error("no training signal");
  EmbeddingModel model;
  model.dim = dim;
  Rng rng(seed);
  const double bound = 0.5 / static_cast<double>(dim);
  auto fill = [&](Matrix& m, size_t rows) {
    m = Matrix(rows, dim);
    for (double& x : m.data()) x = rng.uniform(-bound, bound);
  };
  for (SpaceKind s : {SpaceKind::kRelation, SpaceKind::kEntity}) {
    const SpaceGraph& g = s == SpaceKind::kRelation ? graph.relation : graph.entity;
    SpaceVectors& sv = model.space(s);
    fill(sv.mentions, g.num_mentions);
    fill(sv.features, g.num_features);
    fill(sv.types, g.num_types);
    sv.feature_names = g.feature_names;
    sv.type_names = g.type_names;
  }
  return model;
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double dot(const double* a, const double* b, size_t d) {
  double s = 0.0;
  for (size_t k = 0; k < d; ++k) s += a[k] * b[k];
  return s;
}

double squared_norm(const double* a, size_t d) { return dot(a, a, d); }

namespace {

// log s(x), stable for large |x|.
double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

thread_local std::vector<double> scratch_a, scratch_b, scratch_c;

double* buffer(std::vector<double>& v, size_t d) {
  if (v.size() < d) v.resize(d);
  return v.data();
}

}  // namespace

double second_order_loss(const double* u, const double* c, std::span<const double* const> negatives, size_t d) {
  double loss = -log_sigmoid(dot(u, c, d));
  for (const double* n : negatives) loss -= log_sigmoid(-dot(u, n, d));
  return loss;
}

void step_second_order(double* u, double* c, std::span<double* const> negatives, size_t d, double alpha) {
  // Coefficients first, so every gradient is taken at the same point.
  const double g_pos = alpha * (1.0 - sigmoid(dot(u, c, d)));
  thread_local std::vector<double> g_neg;
  g_neg.resize(negatives.size());
  for (size_t v = 0; v < negatives.size(); ++v) g_neg[v] = -alpha * sigmoid(dot(u, negatives[v], d));

  double* du = buffer(scratch_a, d);
  for (size_t k = 0; k < d; ++k) du[k] = g_pos * c[k];
  for (size_t v = 0; v < negatives.size(); ++v) {
    for (size_t k = 0; k < d; ++k) du[k] += g_neg[v] * negatives[v][k];
  }
  double* u0 = buffer(scratch_b, d);
  std::copy(u, u + d, u0);
  for (size_t k = 0; k < d; ++k) c[k] += g_pos * u0[k];
  for (size_t v = 0; v < negatives.size(); ++v) {
    for (size_t k = 0; k < d; ++k) negatives[v][k] += g_neg[v] * u0[k];
  }
  for (size_t k = 0; k < d; ++k) u[k] += du[k];
}

PartialLabelResult partial_label_loss(const double* u, const Matrix& types, std::span<const TypeId> candidates) {
  const size_t d = types.cols();
  PartialLabelResult res;
  double best_c = -INFINITY, best_n = -INFINITY;
  size_t ci = 0;
  for (size_t t = 0; t < types.rows(); ++t) {
    const TypeId id = static_cast<TypeId>(t);
    while (ci < candidates.size() && candidates[ci] < id) ++ci;
    const bool is_candidate = ci < candidates.size() && candidates[ci] == id;
    const double s = dot(u, types.row(t), d);
    if (is_candidate) {
      if (s > best_c) best_c = s, res.best_candidate = id;
    } else if (s > best_n) {
      best_n = s, res.best_noncandidate = id;
    }
  }
  if (res.best_noncandidate < 0 || res.best_candidate < 0) return res;
  res.loss = std::max(0.0, 1.0 - (best_c - best_n));
  return res;
}

double partial_label_objective(const double* u, const Matrix& types, std::span<const TypeId> candidates,
                               double lambda) {
  const size_t d = types.cols();
  const PartialLabelResult r = partial_label_loss(u, types, candidates);
  double reg = squared_norm(u, d);
  if (r.best_candidate >= 0) reg += squared_norm(types.row(static_cast<size_t>(r.best_candidate)), d);
  if (r.best_noncandidate >= 0) reg += squared_norm(types.row(static_cast<size_t>(r.best_noncandidate)), d);
  return r.loss + 0.5 * lambda * reg;
}

void step_partial_label(double* u, Matrix& types, std::span<const TypeId> candidates, double alpha, double lambda) {
  const size_t d = types.cols();
  const PartialLabelResult r = partial_label_loss(u, types, candidates);
  const double shrink = 1.0 - alpha * lambda;
  double* pos = r.best_candidate >= 0 ? types.row(static_cast<size_t>(r.best_candidate)) : nullptr;
  double* neg = r.best_noncandidate >= 0 ? types.row(static_cast<size_t>(r.best_noncandidate)) : nullptr;
  if (r.loss > 0.0) {
    for (size_t k = 0; k < d; ++k) {
      const double uk = u[k], pk = pos[k], nk = neg[k];
      u[k] = shrink * uk + alpha * (pk - nk);
      pos[k] = shrink * pk + alpha * uk;
      neg[k] = shrink * nk - alpha * uk;
    }
    return;
  }
  for (size_t k = 0; k < d; ++k) u[k] *= shrink;
  if (pos) for (size_t k = 0; k < d; ++k) pos[k] *= shrink;
  if (neg) for (size_t k = 0; k < d; ++k) neg[k] *= shrink;
}

namespace {

// Index of the best non-candidate (lowest id on ties) and its score; -1 when
// every type is a candidate.
std::pair<TypeId, double> best_noncandidate(const double* u, const Matrix& types, std::span<const TypeId> candidates) {
  TypeId best = -1;
  double best_s = -INFINITY;
  size_t ci = 0;
  for (size_t t = 0; t < types.rows(); ++t) {
    const TypeId id = static_cast<TypeId>(t);
    while (ci < candidates.size() && candidates[ci] < id) ++ci;
    if (ci < candidates.size() && candidates[ci] == id) continue;
    const double s = dot(u, types.row(t), types.cols());
    if (s > best_s) best_s = s, best = id;
  }
  return {best, best_s};
}

}  // namespace

double per_candidate_loss(const double* u, const Matrix& types, std::span<const TypeId> candidates) {
  const auto [neg, neg_s] = best_noncandidate(u, types, candidates);
  if (neg < 0) return 0.0;
  double loss = 0.0;
  for (TypeId c : candidates) {
    loss += std::max(0.0, 1.0 - (dot(u, types.row(static_cast<size_t>(c)), types.cols()) - neg_s));
  }
  return loss;
}

double per_candidate_objective(const double* u, const Matrix& types, std::span<const TypeId> candidates,
                               double lambda) {
  const size_t d = types.cols();
  double reg = squared_norm(u, d);
  for (TypeId c : candidates) reg += squared_norm(types.row(static_cast<size_t>(c)), d);
  const auto [neg, neg_s] = best_noncandidate(u, types, candidates);
  if (neg >= 0) reg += squared_norm(types.row(static_cast<size_t>(neg)), d);
  return per_candidate_loss(u, types, candidates) + 0.5 * lambda * reg;
}

void step_per_candidate(double* u, Matrix& types, std::span<const TypeId> candidates, double alpha, double lambda) {
  const size_t d = types.cols();
  const double shrink = 1.0 - alpha * lambda;
  const auto [neg, neg_s] = best_noncandidate(u, types, candidates);
  std::vector<bool> active(candidates.size(), false);
  size_t num_active = 0;
  if (neg >= 0) {
    for (size_t i = 0; i < candidates.size(); ++i) {
      active[i] = 1.0 - (dot(u, types.row(static_cast<size_t>(candidates[i])), d) - neg_s) > 0.0;
      num_active += active[i];
    }
  }
  double* u0 = buffer(scratch_a, d);
  std::copy(u, u + d, u0);
  double* du = buffer(scratch_b, d);
  std::fill(du, du + d, 0.0);
  const double* nrow = neg >= 0 ? types.row(static_cast<size_t>(neg)) : nullptr;
  for (size_t i = 0; i < candidates.size(); ++i) {
    if (!active[i]) continue;
    const double* c = types.row(static_cast<size_t>(candidates[i]));
    for (size_t k = 0; k < d; ++k) du[k] += c[k] - nrow[k];
  }
  for (size_t i = 0; i < candidates.size(); ++i) {
    double* c = types.row(static_cast<size_t>(candidates[i]));
    for (size_t k = 0; k < d; ++k) c[k] = shrink * c[k] + (active[i] ? alpha * u0[k] : 0.0);
  }
  if (neg >= 0) {
    double* n = types.row(static_cast<size_t>(neg));
    for (size_t k = 0; k < d; ++k) n[k] = shrink * n[k] - alpha * static_cast<double>(num_active) * u0[k];
  }
  for (size_t k = 0; k < d; ++k) u[k] = shrink * u0[k] + alpha * du[k];
}

double translation_error(const double* z, const double* m1, const double* m2, size_t d) {
  double s = 0.0;
  for (size_t k = 0; k < d; ++k) {
    const double e = m1[k] + z[k] - m2[k];
    s += e * e;
  }
  return s;
}

double translation_loss(const TripleRef& pos, const TripleRef& neg, size_t d, double margin) {
  return std::max(0.0, margin + translation_error(pos.z, pos.m1, pos.m2, d) - translation_error(neg.z, neg.m1, neg.m2, d));
}

void step_translation(const TripleRef& pos, const TripleRef& neg, size_t d, double alpha, double margin,
                      bool update_entities) {
  if (translation_loss(pos, neg, d, margin) <= 0.0) return;
  double* e = buffer(scratch_a, d);
  double* en = buffer(scratch_c, d);
  for (size_t k = 0; k < d; ++k) {
    e[k] = 2.0 * alpha * (pos.m1[k] + pos.z[k] - pos.m2[k]);
    en[k] = 2.0 * alpha * (neg.m1[k] + neg.z[k] - neg.m2[k]);
  }
  for (size_t k = 0; k < d; ++k) {
    pos.z[k] -= e[k];
    neg.z[k] += en[k];
  }
  if (!update_entities) return;
  for (size_t k = 0; k < d; ++k) {
    pos.m1[k] -= e[k];
    pos.m2[k] += e[k];
    neg.m1[k] += en[k];
    neg.m2[k] -= en[k];
  }
}

int corrupt_triple(const Triple& t, const TrainingGraph& graph, Rng& rng, Triple& out) {
  const int slot = static_cast<int>(rng.uniform_index(3));
  const auto& pool = slot == 0 ? graph.z_corruptions : graph.m_corruptions;
  out = t;
  if (pool.empty()) return -1;
  for (int attempt = 0; attempt < 8; ++attempt) {
    const uint32_t x = pool[rng.uniform_index(pool.size())];
    uint32_t& target = slot == 0 ? out.z : slot == 1 ? out.m1 : out.m2;
    target = x;
    const uint32_t original = slot == 0 ? t.z : slot == 1 ? t.m1 : t.m2;
    if (x != original) return slot;
  }
  return -1;
}

namespace {

double space_edge_term(const SpaceVectors& sv, const SpaceGraph& g, size_t d, const ObjectiveOptions& o, Rng& rng) {
  if (g.edge_weight.empty()) return 0.0;
  const size_t n = g.edge_weight.size();
  double total = 0.0;
  std::vector<const double*> negs(static_cast<size_t>(o.negatives));
  auto edge = [&](size_t e) {
    for (auto& p : negs) p = sv.features.row(g.noise_sampler.sample(rng));
    return g.edge_weight[e] *
           second_order_loss(sv.mentions.row(g.edge_mention[e]), sv.features.row(g.edge_feature[e]), negs, d);
  };
  if (o.mode == ObjectiveMode::kFull) {
    for (size_t e = 0; e < n; ++e) total += edge(e);
    return total;
  }
  const size_t k = std::max<size_t>(1, static_cast<size_t>(std::ceil(o.sample_fraction * static_cast<double>(n))));
  for (size_t i = 0; i < k; ++i) total += edge(rng.uniform_index(n));
  return total * static_cast<double>(n) / static_cast<double>(k);
}

double space_label_term(const SpaceVectors& sv, const SpaceGraph& g, size_t d, const ObjectiveOptions& o) {
  double total = 0.0;
  for (uint32_t i : g.trainable) {
    const auto& cand = g.candidates[i];
    total += o.label_loss == LabelLoss::kPartial ? partial_label_loss(sv.mentions.row(i), sv.types, cand).loss
                                                  : per_candidate_loss(sv.mentions.row(i), sv.types, cand);
  }
  double reg = 0.0;
  for (uint32_t i : g.trainable) reg += squared_norm(sv.mentions.row(i), d);
  for (size_t t = 0; t < sv.types.rows(); ++t) reg += squared_norm(sv.types.row(t), d);
  return total + 0.5 * o.lambda * reg;
}

}  // namespace

ObjectiveValue compute_objective(const EmbeddingModel& model, const TrainingGraph& graph,
                                 const ObjectiveOptions& options) {
  const size_t d = model.dim;
  ObjectiveValue v;
  Rng rng(options.seed);
  v.o_z = space_edge_term(model.relation, graph.relation, d, options, rng) +
          space_label_term(model.relation, graph.relation, d, options);
  v.o_m = space_edge_term(model.entity, graph.entity, d, options, rng) +
          space_label_term(model.entity, graph.entity, d, options);
  auto& z = const_cast<Matrix&>(model.relation.mentions);
  auto& m = const_cast<Matrix&>(model.entity.mentions);
  for (const Triple& t : graph.triples) {
    const TripleRef pos{z.row(t.z), m.row(t.m1), m.row(t.m2)};
    for (int s = 0; s < options.negatives; ++s) {
      Triple c;
      if (corrupt_triple(t, graph, rng, c) < 0) continue;
      v.o_zm += translation_loss(pos, {z.row(c.z), m.row(c.m1), m.row(c.m2)}, d, options.margin);
    }
  }
  return v;
}

}  // namespace cotype
