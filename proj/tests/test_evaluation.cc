#include "cotype/evaluation.h"
#include "doctest.h"
#include "metric_fixture.h"

using namespace cotype;
using namespace cotype::testing;

namespace {

EntityAnnotation ent(uint32_t s, uint32_t a, uint32_t b, std::vector<std::string> types) {
  EntityAnnotation e;
  e.doc = "d";
  e.sentence = s;
  e.span = {a, b};
  e.types = std::move(types);
  return e;
}

RelationAnnotation rel(uint32_t s, Span a, Span b, std::string type, double score = 1.0) {
  RelationAnnotation r;
  r.doc = "d";
  r.sentence = s;
  r.em1 = a;
  r.em2 = b;
  r.type = type;
  r.best_type = type;
  r.score = score;
  return r;
}

}  // namespace

TEST_SUITE("evaluation") {
  TEST_CASE("perfect typing scores one everywhere") {
    const std::vector<EntityAnnotation> g = {ent(0, 0, 2, {"person", "politician"})};
    const auto s = entity_typing_scores(g, g);
    CHECK(s.strict.f1 == 1.0);
    CHECK(s.macro.f1 == 1.0);
    CHECK(s.micro.f1 == 1.0);
  }

  TEST_CASE("missing subtype: strict 0, macro and micro 2/3") {
    const auto s = entity_typing_scores({ent(0, 0, 2, {"person", "politician"})}, {ent(0, 0, 2, {"person"})});
    CHECK(s.strict.f1 == 0.0);
    CHECK(s.macro.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(s.micro.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(s.macro.precision == 1.0);
    CHECK(s.macro.recall == 0.5);
  }

  TEST_CASE("a shifted span is a false positive under every measure") {
    const auto s = entity_typing_scores({ent(0, 0, 2, {"person"})}, {ent(0, 0, 1, {"person"})});
    CHECK(s.strict.precision == 0.0);
    CHECK(s.macro.precision == 0.0);
    CHECK(s.micro.precision == 0.0);
    CHECK(s.micro.recall == 0.0);
    CHECK(s.per_type.at("person") == std::array<size_t, 3>{0, 1, 1});
  }

  TEST_CASE("six-mention fixture") {
    const auto f = six_mention_fixture();
    const auto s = entity_typing_scores(f.gold, f.predicted);
    CHECK(s.strict.f1 == doctest::Approx(MetricFixture::kStrictF1).epsilon(1e-12));
    CHECK(s.macro.f1 == doctest::Approx(MetricFixture::kMacroF1).epsilon(1e-12));
    CHECK(s.micro.f1 == doctest::Approx(MetricFixture::kMicroF1).epsilon(1e-12));
    CHECK(s.gold_mentions == 6);
    CHECK(s.predicted_mentions == 5);
  }

  TEST_CASE("empty gold is rejected") {
    CHECK_THROWS_AS(entity_typing_scores({}, {ent(0, 0, 1, {"person"})}), InputError);
  }

  TEST_CASE("classification accuracy drops gold None") {
    const std::vector<RelationAnnotation> g = {rel(0, {0, 1}, {2, 3}, "born_in"), rel(1, {0, 1}, {2, 3}, "visit"),
                                               rel(2, {0, 1}, {2, 3}, "visit"), rel(3, {0, 1}, {2, 3}, "born_in"),
                                               rel(4, {0, 1}, {2, 3}, "None")};
    std::vector<RelationAnnotation> p = {rel(0, {0, 1}, {2, 3}, "born_in"), rel(1, {0, 1}, {2, 3}, "visit"),
                                         rel(2, {0, 1}, {2, 3}, "born_in"), rel(3, {0, 1}, {2, 3}, "born_in"),
                                         rel(4, {0, 1}, {2, 3}, "visit")};
    CHECK(relation_classification_accuracy(g, p) == 0.75);
    p[2].type = "visit";
    CHECK(relation_classification_accuracy(g, p) == 1.0);
  }

  TEST_CASE("extraction P/R/F1 and curve") {
    const std::vector<RelationAnnotation> g = {rel(0, {0, 1}, {2, 3}, "born_in"), rel(1, {0, 1}, {2, 3}, "visit")};
    auto exact = relation_extraction_prf(g, g);
    CHECK(exact.at_default.f1 == 1.0);
    const std::vector<RelationAnnotation> p = {rel(0, {0, 1}, {2, 3}, "born_in", 0.9),
                                               rel(1, {0, 1}, {2, 3}, "visit", 0.6),
                                               rel(1, {2, 3}, {0, 1}, "visit", 0.4),
                                               rel(2, {0, 1}, {2, 3}, "born_in", 0.2)};
    const auto r = relation_extraction_prf(g, p);
    CHECK(r.at_default.precision == 0.5);
    CHECK(r.at_default.recall == 1.0);
    CHECK(r.at_default.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    for (size_t i = 1; i < r.curve.size(); ++i) {
      CHECK(r.curve[i].threshold > r.curve[i - 1].threshold);
      CHECK(r.curve[i].true_positives <= r.curve[i - 1].true_positives);
      CHECK(r.curve[i].predicted <= r.curve[i - 1].predicted);
    }
    CHECK(r.best.prf.f1 == 1.0);
    CHECK(r.best.threshold > 0.4);
    CHECK(r.best.threshold <= 0.6);
  }

  TEST_CASE("annotation text round trip") {
    Annotations a;
    a.entities = six_mention_fixture().gold;
    a.relations = {rel(0, {0, 1}, {2, 3}, "born_in", 0.5)};
    CHECK(format_annotations(parse_annotations(format_annotations(a))) == format_annotations(a));
    CHECK_THROWS_AS(parse_annotations("{\"kind\":\"widget\"}\n"), InputError);
  }
}
