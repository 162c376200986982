#include "cotype/inference.h"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace cotype {

double cosine(const double* a, const double* b, size_t d) {
  const double na = std::sqrt(squared_norm(a, d));
  const double nb = std::sqrt(squared_norm(b, d));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b, d) / (na * nb);
}

FeatureIndex::FeatureIndex(const SpaceVectors& space) : space_(space) {
  for (size_t i = 0; i < space.feature_names.size(); ++i) index_.emplace(space.feature_names[i], i);
}

const double* FeatureIndex::find(const std::string& feature) const {
  auto it = index_.find(feature);
  return it == index_.end() ? nullptr : space_.features.row(it->second);
}

MentionEmbedding embed_mention(const std::vector<std::string>& features, const FeatureIndex& index, size_t dim) {
  MentionEmbedding out;
  out.vec.assign(dim, 0.0);
  for (const auto& f : features) {
    const double* v = index.find(f);
    if (!v) continue;
    for (size_t k = 0; k < dim; ++k) out.vec[k] += v[k];
    ++out.num_features;
  }
  return out;
}

RelationPrediction predict_relation_type(const MentionEmbedding& z, const EmbeddingModel& model,
                                         const TypeHierarchy& hierarchy, const InferenceConfig& config) {
  RelationPrediction p;
  p.type = hierarchy.none_relation_type();
  if (z.zero() || squared_norm(z.vec.data(), model.dim) == 0.0) return p;
  const Matrix& types = model.relation.types;
  for (size_t t = 0; t < types.rows(); ++t) {
    const TypeId id = static_cast<TypeId>(t);
    if (id == hierarchy.none_relation_type() && !config.include_none_relation) continue;
    const double s = cosine(z.vec.data(), types.row(t), model.dim);
    if (p.best_type < 0 || s > p.score) {
      p.best_type = id;
      p.score = s;
    }
  }
  if (p.best_type >= 0 && p.score >= config.relation_threshold()) p.type = p.best_type;
  return p;
}

EntityPrediction predict_entity_typepath(const MentionEmbedding& m, const EmbeddingModel& model,
                                         const TypeHierarchy& hierarchy, const InferenceConfig& config) {
  EntityPrediction p;
  if (m.zero() || squared_norm(m.vec.data(), model.dim) == 0.0) return p;
  const Matrix& types = model.entity.types;
  TypeId node = kRootType;
  while (true) {
    const auto& children = hierarchy.children(node);
    if (children.empty()) break;
    TypeId best = -1;
    double best_s = 0.0;
    for (TypeId c : children) {
      const double s = cosine(m.vec.data(), types.row(static_cast<size_t>(c)), model.dim);
      if (best < 0 || s > best_s) best = c, best_s = s;
    }
    if (node == kRootType) {
      p.best_top = best;
      p.score = best_s;
    }
    if (best_s < config.entity_threshold()) break;
    p.path.push_back(best);
    node = best;
  }
  return p;
}

void check_model_types(const EmbeddingModel& model, const TypeHierarchy& hierarchy) {
  const auto& rel = model.relation.type_names;
  const auto& ent = model.entity.type_names;
  bool ok = rel.size() == hierarchy.num_relation_types() && ent.size() == hierarchy.num_entity_types();
  for (size_t i = 0; ok && i < rel.size(); ++i) ok = rel[i] == hierarchy.relation_type_name(static_cast<TypeId>(i));
  for (size_t i = 0; ok && i < ent.size(); ++i) ok = ent[i] == hierarchy.entity_type_name(static_cast<TypeId>(i));
  if (!ok) throw InputError("model type vectors do not match the type hierarchy");
}

Predictions batch_predict(const Corpus& corpus, std::vector<MentionSpan> mentions, const EmbeddingModel& model,
                          const TypeHierarchy& hierarchy, const InferenceConfig& config, const FeatureOptions& features,
                          int threads, const std::vector<std::vector<std::string>>* injected_types) {
  check_model_types(model, hierarchy);
  std::sort(mentions.begin(), mentions.end());
  mentions.erase(std::unique(mentions.begin(), mentions.end()), mentions.end());
  const FeatureIndex rel_index(model.relation);
  const FeatureIndex ent_index(model.entity);

  Predictions out;
  out.entities.resize(mentions.size());
  parallel_for(mentions.size(), threads, [&](size_t i) {
    const auto& ms = mentions[i];
    const auto feats = extract_entity_features(corpus.sentence(ms.sentence), ms.span, features);
    out.entities[i] = {ms.sentence, ms.span,
                       predict_entity_typepath(embed_mention(feats, ent_index, model.dim), model, hierarchy, config)};
  });

  size_t i = 0;
  while (i < mentions.size()) {
    size_t j = i;
    while (j < mentions.size() && mentions[j].sentence == mentions[i].sentence) ++j;
    for (size_t a = i; a < j; ++a) {
      for (size_t b = i; b < j; ++b) {
        if (a != b && !mentions[a].span.overlaps(mentions[b].span)) {
          out.relations.push_back({mentions[a].sentence, a, b, {}});
        }
      }
    }
    i = j;
  }
  parallel_for(out.relations.size(), threads, [&](size_t r) {
    auto& rec = out.relations[r];
    const Sentence& s = corpus.sentence(rec.sentence);
    auto feats = extract_relation_features(s, mentions[rec.arg1].span, mentions[rec.arg2].span, features);
    if (injected_types) {
      for (auto& f : entity_type_features(1, injected_types->at(rec.arg1))) feats.push_back(std::move(f));
      for (auto& f : entity_type_features(2, injected_types->at(rec.arg2))) feats.push_back(std::move(f));
    }
    rec.prediction = predict_relation_type(embed_mention(feats, rel_index, model.dim), model, hierarchy, config);
  });
  return out;
}

std::string format_predictions(const Predictions& p, const Corpus& corpus, const TypeHierarchy& hierarchy) {
  using nlohmann::json;
  std::string out;
  auto best = [](TypeId t, const std::string& name) { return t < 0 ? json(nullptr) : json(name); };
  for (const auto& e : p.entities) {
    const Sentence& s = corpus.sentence(e.sentence);
    json types = json::array();
    for (TypeId t : e.prediction.path) types.push_back(hierarchy.entity_type_name(t));
    const TypeId top = e.prediction.best_top;
    json j{{"kind", "entity"},
           {"doc", s.doc_id},
           {"sentence", s.index},
           {"start", e.span.start},
           {"end", e.span.end},
           {"surface", s.surface(e.span)},
           {"types", types},
           {"best_type", best(top, top < 0 ? "" : hierarchy.entity_type_name(top))},
           {"score", e.prediction.score}};
    out += j.dump() + "\n";
  }
  for (const auto& r : p.relations) {
    const Sentence& s = corpus.sentence(r.sentence);
    const auto& a = p.entities[r.arg1];
    const auto& b = p.entities[r.arg2];
    const TypeId bt = r.prediction.best_type;
    json j{{"kind", "relation"},
           {"doc", s.doc_id},
           {"sentence", s.index},
           {"em1", {{"start", a.span.start}, {"end", a.span.end}}},
           {"em2", {{"start", b.span.start}, {"end", b.span.end}}},
           {"type", hierarchy.relation_type_name(r.prediction.type)},
           {"best_type", best(bt, bt < 0 ? "" : hierarchy.relation_type_name(bt))},
           {"score", r.prediction.score}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace cotype
