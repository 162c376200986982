#include <cmath>

#include "cotype/inference.h"
#include "doctest.h"
#include "fixtures.h"

using namespace cotype;
using namespace cotype::testing;

namespace {

// A model over the toy hierarchy whose type vectors are chosen by the test.
EmbeddingModel toy_model(const TypeHierarchy& h, size_t d) {
  EmbeddingModel m;
  m.dim = d;
  m.entity.types = Matrix(h.num_entity_types(), d);
  m.relation.types = Matrix(h.num_relation_types(), d);
  for (size_t i = 0; i < h.num_entity_types(); ++i) {
    m.entity.type_names.push_back(h.entity_type_name(static_cast<TypeId>(i)));
  }
  for (size_t i = 0; i < h.num_relation_types(); ++i) {
    m.relation.type_names.push_back(h.relation_type_name(static_cast<TypeId>(i)));
  }
  return m;
}

void set_row(Matrix& m, TypeId t, std::vector<double> v) {
  std::copy(v.begin(), v.end(), m.row(static_cast<size_t>(t)));
}

MentionEmbedding mention(std::vector<double> v) { return {std::move(v), 1}; }

InferenceConfig with_eta(double eta) {
  InferenceConfig c;
  c.eta = eta;
  return c;
}

}  // namespace

TEST_SUITE("inference") {
  TEST_CASE("cosine agrees with a direct formula") {
    Rng rng(1);
    const size_t d = 16;
    for (int i = 0; i < 1000; ++i) {
      std::vector<double> a(d), b(d);
      for (auto& x : a) x = 2.0 * rng.uniform01() - 1.0;
      for (auto& x : b) x = 2.0 * rng.uniform01() - 1.0;
      long double ab = 0, aa = 0, bb = 0;
      for (size_t k = 0; k < d; ++k) {
        ab += static_cast<long double>(a[k]) * b[k];
        aa += static_cast<long double>(a[k]) * a[k];
        bb += static_cast<long double>(b[k]) * b[k];
      }
      const double ref = static_cast<double>(ab / std::sqrt(aa * bb));
      CHECK(std::abs(cosine(a.data(), b.data(), d) - ref) < 1e-12);
    }
    const double v[3] = {0.3, -2.0, 1.0};
    CHECK(cosine(v, v, 3) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("relation below threshold is None") {
    const auto h = toy_hierarchy();
    auto m = toy_model(h, 2);
    const TypeId born = *h.find_relation_type("born_in");
    set_row(m.relation.types, born, {1.0, 0.0});
    set_row(m.relation.types, *h.find_relation_type("visit"), {0.0, 1.0});
    set_row(m.relation.types, h.none_relation_type(), {1.0, 0.1});
    InferenceConfig cfg;
    auto p = predict_relation_type(mention({1.0, 0.2}), m, h, cfg);
    CHECK(p.type == born);
    CHECK(p.best_type == born);
    // cos = 0.3 at 72.5 degrees off every type.
    const double angle = std::acos(0.3);
    p = predict_relation_type(mention({std::cos(angle), -std::sin(angle)}), m, h, cfg);
    CHECK(p.type == h.none_relation_type());
    CHECK(p.best_type == born);
    CHECK(p.score == doctest::Approx(0.3));
    // None competes only when enabled.
    cfg.include_none_relation = true;
    CHECK(predict_relation_type(mention({1.0, 0.1}), m, h, cfg).type == h.none_relation_type());
    CHECK(predict_relation_type(mention({0.0, 0.0}), m, h, cfg).best_type == -1);
  }

  TEST_CASE("top-down descent") {
    const auto h = toy_hierarchy();
    auto m = toy_model(h, 3);
    const TypeId person = *h.find_entity_type("person"), politician = *h.find_entity_type("politician");
    const TypeId artist = *h.find_entity_type("artist"), location = *h.find_entity_type("location");
    set_row(m.entity.types, person, {1.0, 0.0, 0.0});
    set_row(m.entity.types, location, {0.0, 1.0, 0.0});
    set_row(m.entity.types, *h.find_entity_type("organization"), {0.0, 0.0, 1.0});
    set_row(m.entity.types, politician, {0.3, 0.0, 1.0});
    set_row(m.entity.types, artist, {0.3, 0.0, -1.0});
    const InferenceConfig cfg;

    auto p = predict_entity_typepath(mention({1.0, 0.0, 0.6}), m, h, cfg);
    CHECK(p.path == std::vector<TypeId>{person, politician});
    // Child below threshold: stop at the parent.
    p = predict_entity_typepath(mention({1.0, 0.0, 0.0}), m, h, cfg);
    CHECK(p.path == std::vector<TypeId>{person});
    // Top level below threshold: None.
    p = predict_entity_typepath(mention({1.0, 1.0, 1.0}), m, h, with_eta(0.8));
    CHECK(p.path.empty());
    CHECK(p.best_top >= 0);
    CHECK(predict_entity_typepath(mention({0.0, 0.0, 0.0}), m, h, cfg).path.empty());
  }

  TEST_CASE("predicted paths follow the hierarchy") {
    const auto h = toy_hierarchy();
    auto m = toy_model(h, 4);
    Rng rng(3);
    for (auto& x : m.entity.types.data()) x = 2.0 * rng.uniform01() - 1.0;
    for (int i = 0; i < 500; ++i) {
      std::vector<double> v(4);
      for (auto& x : v) x = 2.0 * rng.uniform01() - 1.0;
      const auto p = predict_entity_typepath(mention(v), m, h, with_eta(-1.0));
      REQUIRE_FALSE(p.path.empty());
      CHECK(h.parent(p.path.front()) == kRootType);
      for (size_t k = 1; k < p.path.size(); ++k) CHECK(h.parent(p.path[k]) == p.path[k - 1]);
      CHECK(h.children(p.path.back()).empty());
      for (TypeId t : p.path) CHECK(t != h.none_entity_type());
    }
  }

  TEST_CASE("mention embedding sums known features per occurrence") {
    SpaceVectors sv;
    sv.features = Matrix(2, 2);
    sv.feature_names = {"a", "b"};
    set_row(sv.features, 0, {1.0, 2.0});
    set_row(sv.features, 1, {-1.0, 0.5});
    const FeatureIndex idx(sv);
    const auto e = embed_mention({"a", "a", "b", "zzz"}, idx, 2);
    CHECK(e.num_features == 3);
    CHECK(e.vec == std::vector<double>{1.0, 4.5});
    CHECK(embed_mention({"zzz"}, idx, 2).zero());
  }

  TEST_CASE("model with mismatched types is rejected") {
    const auto h = toy_hierarchy();
    auto m = toy_model(h, 2);
    m.entity.type_names[0] = "wrong";
    CHECK_THROWS_AS(check_model_types(m, h), InputError);
  }
}
