#include "cotype/evaluation.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

#include "cotype/util.h"
#include "json.hpp"

namespace cotype {

using nlohmann::json;

namespace {

Span read_span(const json& j) { return {j.at("start").get<uint32_t>(), j.at("end").get<uint32_t>()}; }

std::string optional_string(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? std::string() : it->get<std::string>();
}

double optional_score(const json& j) {
  auto it = j.find("score");
  return it == j.end() || it->is_null() ? 1.0 : it->get<double>();
}

using EntityKey = std::tuple<std::string, uint32_t, Span>;
using RelationKey = std::tuple<std::string, uint32_t, Span, Span>;

EntityKey key(const EntityAnnotation& e) { return {e.doc, e.sentence, e.span}; }
RelationKey key(const RelationAnnotation& r) { return {r.doc, r.sentence, r.em1, r.em2}; }

}  // namespace

Annotations parse_annotations(const std::string& content, const std::string& source) {
  Annotations a;
  std::istringstream in(content);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    try {
      const json j = json::parse(line);
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "entity") {
        EntityAnnotation e;
        e.doc = j.at("doc").get<std::string>();
        e.sentence = j.at("sentence").get<uint32_t>();
        e.span = read_span(j);
        e.types = j.at("types").get<std::vector<std::string>>();
        e.best_type = optional_string(j, "best_type");
        e.score = optional_score(j);
        a.entities.push_back(std::move(e));
      } else if (kind == "relation") {
        RelationAnnotation r;
        r.doc = j.at("doc").get<std::string>();
        r.sentence = j.at("sentence").get<uint32_t>();
        r.em1 = read_span(j.at("em1"));
        r.em2 = read_span(j.at("em2"));
        r.type = j.at("type").get<std::string>();
        r.best_type = optional_string(j, "best_type");
        r.score = optional_score(j);
        a.relations.push_back(std::move(r));
      } else {
        throw InputError(where + ": unknown record kind '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  return a;
}

std::string format_annotations(const Annotations& a) {
  std::string out;
  for (const auto& e : a.entities) {
    out += json{{"kind", "entity"},   {"doc", e.doc},        {"sentence", e.sentence},
                {"start", e.span.start}, {"end", e.span.end}, {"types", e.types}}
               .dump() +
           "\n";
  }
  for (const auto& r : a.relations) {
    out += json{{"kind", "relation"},
                {"doc", r.doc},
                {"sentence", r.sentence},
                {"em1", {{"start", r.em1.start}, {"end", r.em1.end}}},
                {"em2", {{"start", r.em2.start}, {"end", r.em2.end}}},
                {"type", r.type}}
               .dump() +
           "\n";
  }
  return out;
}

Annotations to_annotations(const Predictions& p, const Corpus& corpus, const TypeHierarchy& hierarchy) {
  Annotations a;
  for (const auto& e : p.entities) {
    const Sentence& s = corpus.sentence(e.sentence);
    EntityAnnotation ea{s.doc_id, s.index, e.span, {}, {}, e.prediction.score};
    for (TypeId t : e.prediction.path) ea.types.push_back(hierarchy.entity_type_name(t));
    if (e.prediction.best_top >= 0) ea.best_type = hierarchy.entity_type_name(e.prediction.best_top);
    a.entities.push_back(std::move(ea));
  }
  for (const auto& r : p.relations) {
    const Sentence& s = corpus.sentence(r.sentence);
    RelationAnnotation ra{s.doc_id, s.index, p.entities[r.arg1].span, p.entities[r.arg2].span,
                          hierarchy.relation_type_name(r.prediction.type), {}, r.prediction.score};
    if (r.prediction.best_type >= 0) ra.best_type = hierarchy.relation_type_name(r.prediction.best_type);
    a.relations.push_back(std::move(ra));
  }
  return a;
}

PRF make_prf(double tp_precision, double num_predicted, double tp_recall, double num_gold) {
  PRF r;
  r.precision = num_predicted > 0 ? tp_precision / num_predicted : 1.0;
  r.recall = num_gold > 0 ? tp_recall / num_gold : 0.0;
  r.f1 = r.precision + r.recall > 0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

EntityTypingScores entity_typing_scores(const std::vector<EntityAnnotation>& gold,
                                        const std::vector<EntityAnnotation>& predicted) {
  if (gold.empty()) throw InputError("entity typing: empty gold set");
  std::map<EntityKey, std::set<std::string>> g, p;
  for (const auto& e : gold) g[key(e)].insert(e.types.begin(), e.types.end());
  for (const auto& e : predicted) {
    if (!e.types.empty()) p[key(e)].insert(e.types.begin(), e.types.end());
  }

  EntityTypingScores s;
  s.gold_mentions = g.size();
  s.predicted_mentions = p.size();
  double strict_tp = 0, macro_p = 0, macro_r = 0, micro_tp = 0, micro_pred = 0, micro_gold = 0;
  for (const auto& [k, types] : p) {
    micro_pred += static_cast<double>(types.size());
    auto it = g.find(k);
    if (it == g.end()) {
      for (const auto& t : types) ++s.per_type[t][1];
      continue;
    }
    size_t overlap = 0;
    for (const auto& t : types) {
      const bool hit = it->second.count(t) > 0;
      overlap += hit;
      ++s.per_type[t][hit ? 0 : 1];
    }
    strict_tp += types == it->second;
    macro_p += static_cast<double>(overlap) / static_cast<double>(types.size());
    micro_tp += static_cast<double>(overlap);
  }
  for (const auto& [k, types] : g) {
    micro_gold += static_cast<double>(types.size());
    auto it = p.find(k);
    size_t overlap = 0;
    for (const auto& t : types) {
      const bool hit = it != p.end() && it->second.count(t) > 0;
      overlap += hit;
      if (!hit) ++s.per_type[t][2];
    }
    if (!types.empty()) macro_r += static_cast<double>(overlap) / static_cast<double>(types.size());
  }
  const double np = static_cast<double>(p.size()), ng = static_cast<double>(g.size());
  s.strict = make_prf(strict_tp, np, strict_tp, ng);
  s.macro = make_prf(macro_p, np, macro_r, ng);
  s.micro = make_prf(micro_tp, micro_pred, micro_tp, micro_gold);
  return s;
}

double relation_classification_accuracy(const std::vector<RelationAnnotation>& gold,
                                        const std::vector<RelationAnnotation>& predicted) {
  const std::string none(TypeHierarchy::kNoneName);
  std::map<RelationKey, std::string> pred;
  for (const auto& r : predicted) pred[key(r)] = r.type;
  size_t total = 0, correct = 0;
  for (const auto& r : gold) {
    if (r.type == none) continue;
    ++total;
    auto it = pred.find(key(r));
    correct += it != pred.end() && it->second == r.type;
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

std::vector<double> default_threshold_grid() {
  std::vector<double> grid;
  for (int i = -20; i <= 20; ++i) grid.push_back(i * 0.05);
  grid.push_back(1.01);
  return grid;
}

RelationExtractionScores relation_extraction_prf(const std::vector<RelationAnnotation>& gold,
                                                 const std::vector<RelationAnnotation>& predicted,
                                                 const std::vector<double>& thresholds) {
  const std::string none(TypeHierarchy::kNoneName);
  std::set<std::pair<RelationKey, std::string>> g;
  for (const auto& r : gold) {
    if (r.type != none) g.insert({key(r), r.type});
  }
  RelationExtractionScores s;
  s.gold = g.size();
  auto count = [&](auto&& type_of) {
    std::set<std::pair<RelationKey, std::string>> seen;
    size_t tp = 0;
    for (const auto& r : predicted) {
      const std::string t = type_of(r);
      if (t.empty() || t == none) continue;
      if (!seen.insert({key(r), t}).second) continue;
      tp += g.count({key(r), t});
    }
    return std::make_pair(tp, seen.size());
  };
  auto [tp, npred] = count([](const RelationAnnotation& r) { return r.type; });
  s.true_positives = tp;
  s.predicted = npred;
  const double ng = static_cast<double>(g.size());
  s.at_default = make_prf(static_cast<double>(tp), static_cast<double>(npred), static_cast<double>(tp), ng);
  bool first = true;
  for (double th : thresholds) {
    auto [ctp, cpred] = count([th](const RelationAnnotation& r) { return r.score >= th ? r.best_type : std::string(); });
    CurvePoint pt{th, ctp, cpred,
                  make_prf(static_cast<double>(ctp), static_cast<double>(cpred), static_cast<double>(ctp), ng)};
    s.curve.push_back(pt);
    if (first || pt.prf.f1 > s.best.prf.f1) s.best = pt;
    first = false;
  }
  return s;
}

std::string format_curve(const std::vector<CurvePoint>& curve) {
  std::string out = "# precision is 1 when nothing is predicted\nthreshold\tprecision\trecall\n";
  char buf[96];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof(buf), "%.2f\t%.6f\t%.6f\n", p.threshold, p.prf.precision, p.prf.recall);
    out += buf;
  }
  return out;
}

MetricsReport evaluate(const Annotations& gold, const Annotations& predicted) {
  MetricsReport r;
  if (!gold.entities.empty()) {
    r.entity = entity_typing_scores(gold.entities, predicted.entities);
    r.has_entity = true;
  }
  r.relation_accuracy = relation_classification_accuracy(gold.relations, predicted.relations);
  r.relation = relation_extraction_prf(gold.relations, predicted.relations);
  return r;
}

std::string metrics_json(const MetricsReport& r) {
  auto prf = [](const PRF& p) { return json{{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}}; };
  json j;
  j["boundary_matching"] = "exact";
  j["precision_at_zero_predictions"] = 1.0;
  if (r.has_entity) {
    json per_type = json::object();
    for (const auto& [t, c] : r.entity.per_type) per_type[t] = {{"tp", c[0]}, {"fp", c[1]}, {"fn", c[2]}};
    j["entity_typing"] = {{"strict", prf(r.entity.strict)},
                          {"macro", prf(r.entity.macro)},
                          {"micro", prf(r.entity.micro)},
                          {"gold_mentions", r.entity.gold_mentions},
                          {"predicted_mentions", r.entity.predicted_mentions},
                          {"per_type", per_type}};
  }
  j["relation_classification_accuracy"] = r.relation_accuracy;
  j["relation_extraction"] = {{"default", prf(r.relation.at_default)},
                              {"true_positives", r.relation.true_positives},
                              {"predicted", r.relation.predicted},
                              {"gold", r.relation.gold},
                              {"best_threshold", r.relation.best.threshold},
                              {"best", prf(r.relation.best.prf)}};
  return j.dump(2) + "\n";
}

}  // namespace cotype
