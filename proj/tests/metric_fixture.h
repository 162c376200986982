#ifndef COTYPE_TESTS_METRIC_FIXTURE_H_
#define COTYPE_TESTS_METRIC_FIXTURE_H_

#include "cotype/evaluation.h"

namespace cotype::testing {

// Six gold mentions against five predictions:
//   m1 exact, m2 one of two types, m3 one shared type plus a wrong one,
//   m4 missed, m5 right types on a shifted span, m6 exact.
// Hand counts:
//   strict  P 2/5, R 2/6                       -> F1 4/11
//   macro   P (1+1+.5+0+1)/5, R (1+.5+.5+0+0+1)/6 -> F1 7/12
//   micro   P 5/8, R 5/10                      -> F1 5/9
struct MetricFixture {
  std::vector<EntityAnnotation> gold;
  std::vector<EntityAnnotation> predicted;
  static constexpr double kStrictF1 = 4.0 / 11.0;
  static constexpr double kMacroF1 = 7.0 / 12.0;
  static constexpr double kMicroF1 = 5.0 / 9.0;
};

inline MetricFixture six_mention_fixture() {
  auto e = [](uint32_t s, uint32_t a, uint32_t b, std::vector<std::string> t) {
    EntityAnnotation x;
    x.doc = "d";
    x.sentence = s;
    x.span = {a, b};
    x.types = std::move(t);
    return x;
  };
  MetricFixture f;
  f.gold = {e(0, 0, 2, {"person", "politician"}), e(1, 0, 1, {"person", "politician"}),
            e(2, 3, 4, {"location", "city"}),      e(3, 0, 1, {"organization"}),
            e(4, 0, 2, {"person", "artist"}),      e(5, 1, 2, {"location"})};
  f.predicted = {e(0, 0, 2, {"person", "politician"}), e(1, 0, 1, {"person"}), e(2, 3, 4, {"location", "country"}),
                 e(4, 0, 1, {"person", "artist"}), e(5, 1, 2, {"location"})};
  return f;
}

}  // namespace cotype::testing

#endif  // COTYPE_TESTS_METRIC_FIXTURE_H_
