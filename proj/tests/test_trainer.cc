#include "cotype/trainer.h"
#include "doctest.h"
#include "graph_fixture.h"

using namespace cotype;
using namespace cotype::testing;

namespace {

TrainConfig quick_config() {
  TrainConfig c;
  c.dim = 16;
  c.max_iters = 40000;
  c.objective_check_every = 10000;
  c.objective_mode = ObjectiveMode::kFull;
  c.convergence_tol = 0.0;
  return c;
}

}  // namespace

TEST_SUITE("trainer") {
  TEST_CASE("fixed seed gives identical models") {
    const auto p = small_problem({.sentences = 400, .test_sentences = 10, .seed = 2});
    auto c = quick_config();
    c.seed = 7;
    const auto a = serialize_model(train(p.graph, c), true);
    CHECK(a == serialize_model(train(p.graph, c), true));
    c.seed = 8;
    CHECK(a != serialize_model(train(p.graph, c), true));
  }

  TEST_CASE("objective falls during training") {
    const auto p = small_problem({.sentences = 400, .test_sentences = 10, .seed = 3});
    for (auto schedule : {Schedule::kJoint, Schedule::kTwoStage}) {
      auto c = quick_config();
      c.schedule = schedule;
      TrainStats st;
      train(p.graph, c, &st);
      REQUIRE(st.trace.size() >= 2);
      CHECK(st.trace.back().second.total() < st.trace.front().second.total());
      // Each stage of the two-stage schedule has its own budget.
      CHECK(st.iterations <= (schedule == Schedule::kJoint ? 1 : 2) * c.max_iters);
    }
  }

  TEST_CASE("iteration budget scales with edges") {
    const auto p = small_problem({.sentences = 400, .test_sentences = 10, .seed = 3});
    TrainConfig c;
    const size_t edges = std::max(p.graph.relation.edge_weight.size(), p.graph.entity.edge_weight.size());
    CHECK(resolve_max_iters(p.graph, c) == static_cast<uint64_t>(10.0 * static_cast<double>(edges)));
    c.max_iters = 123;
    CHECK(resolve_max_iters(p.graph, c) == 123);
  }

  TEST_CASE("invalid settings are input errors") {
    TrainConfig c;
    c.dim = 0;
    CHECK_THROWS_AS(validate(c), InputError);
    c = {};
    c.alpha = 0.0;
    CHECK_THROWS_AS(validate(c), InputError);
    c = {};
    c.lambda = -1.0;
    CHECK_THROWS_AS(validate(c), InputError);
    c = {};
    c.negatives = 0;
    CHECK_THROWS_AS(validate(c), InputError);
  }
}
