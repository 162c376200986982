#include <cmath>

#include "cotype/embedder.h"
#include "doctest.h"
#include "gradcheck.h"
#include "graph_fixture.h"

using namespace cotype;
using namespace cotype::testing;

namespace {

constexpr double kGradTol = 1e-4;  // relative error, analytic vs central difference

std::vector<double> random_vector(Rng& rng, size_t d, double scale) {
  std::vector<double> v(d);
  for (auto& x : v) x = scale * (2.0 * rng.uniform01() - 1.0);
  return v;
}

Matrix random_matrix(Rng& rng, size_t rows, size_t d, double scale) {
  Matrix m(rows, d);
  for (auto& x : m.data()) x = scale * (2.0 * rng.uniform01() - 1.0);
  return m;
}

}  // namespace

TEST_SUITE("embedder") {
  TEST_CASE("second-order step follows the loss gradient") {
    Rng rng(1);
    const size_t d = 8;
    for (int trial = 0; trial < 20; ++trial) {
      auto u = random_vector(rng, d, 0.5), c = random_vector(rng, d, 0.5);
      std::vector<std::vector<double>> neg;
      for (int v = 0; v < 3; ++v) neg.push_back(random_vector(rng, d, 0.5));
      std::vector<double*> np;
      std::vector<Block> params = {{u.data(), d}, {c.data(), d}};
      for (auto& n : neg) {
        np.push_back(n.data());
        params.push_back({n.data(), d});
      }
      auto loss = [&] {
        std::vector<const double*> cp(np.begin(), np.end());
        return second_order_loss(u.data(), c.data(), cp, d);
      };
      CHECK(gradient_error(params, loss, [&](double a) { step_second_order(u.data(), c.data(), np, d, a); }) <
            kGradTol);
    }
  }

  TEST_CASE("partial-label step follows the regularized objective") {
    Rng rng(2);
    const size_t d = 6;
    const std::vector<TypeId> cand = {1, 3};
    for (double lambda : {0.0, 1e-4, 0.1}) {
      for (int trial = 0; trial < 20; ++trial) {
        auto u = random_vector(rng, d, 0.5);
        Matrix types = random_matrix(rng, 5, d, 0.5);
        if (partial_label_loss(u.data(), types, cand).loss <= 0.0) continue;
        std::vector<Block> params = {{u.data(), d}, {types.data().data(), types.data().size()}};
        auto loss = [&] { return partial_label_objective(u.data(), types, cand, lambda); };
        CHECK(gradient_error(params, loss,
                             [&](double a) { step_partial_label(u.data(), types, cand, a, lambda); }) < kGradTol);
      }
    }
  }

  TEST_CASE("per-candidate step follows its objective") {
    Rng rng(3);
    const size_t d = 6;
    const std::vector<TypeId> cand = {0, 2, 4};
    for (int trial = 0; trial < 20; ++trial) {
      auto u = random_vector(rng, d, 0.5);
      Matrix types = random_matrix(rng, 6, d, 0.5);
      std::vector<Block> params = {{u.data(), d}, {types.data().data(), types.data().size()}};
      auto loss = [&] { return per_candidate_objective(u.data(), types, cand, 1e-3); };
      CHECK(gradient_error(params, loss, [&](double a) { step_per_candidate(u.data(), types, cand, a, 1e-3); }) <
            kGradTol);
    }
  }

  TEST_CASE("translation step follows the hinge, with and without shared slots") {
    Rng rng(4);
    const size_t d = 5;
    for (int trial = 0; trial < 20; ++trial) {
      auto z = random_vector(rng, d, 0.5), m1 = random_vector(rng, d, 0.5), m2 = random_vector(rng, d, 0.5);
      auto z2 = random_vector(rng, d, 0.5), m3 = random_vector(rng, d, 0.5);
      // Distinct negative relation, shared arguments.
      TripleRef pos{z.data(), m1.data(), m2.data()}, neg{z2.data(), m1.data(), m2.data()};
      std::vector<Block> params = {{z.data(), d}, {m1.data(), d}, {m2.data(), d}, {z2.data(), d}};
      auto loss = [&] { return translation_loss(pos, neg, d, 1.0); };
      if (loss() > 0.0) {
        CHECK(gradient_error(params, loss, [&](double a) { step_translation(pos, neg, d, a, 1.0); }) < kGradTol);
      }
      // Corrupted second argument.
      TripleRef neg2{z.data(), m1.data(), m3.data()};
      std::vector<Block> params2 = {{z.data(), d}, {m1.data(), d}, {m2.data(), d}, {m3.data(), d}};
      auto loss2 = [&] { return translation_loss(pos, neg2, d, 1.0); };
      if (loss2() > 0.0) {
        CHECK(gradient_error(params2, loss2, [&](double a) { step_translation(pos, neg2, d, a, 1.0); }) <
              kGradTol);
      }
    }
  }

  TEST_CASE("partial-label hinge values") {
    Matrix types(3, 1);
    types.row(0)[0] = 0.9;
    types.row(1)[0] = 0.2;
    types.row(2)[0] = 0.1;
    const double u[1] = {1.0};
    const std::vector<TypeId> cand = {0};
    const auto r = partial_label_loss(u, types, cand);
    CHECK(r.loss == doctest::Approx(0.3));
    CHECK(r.best_candidate == 0);
    CHECK(r.best_noncandidate == 1);
    types.row(0)[0] = 2.0;
    types.row(1)[0] = 0.5;
    CHECK(partial_label_loss(u, types, cand).loss == 0.0);
    const std::vector<TypeId> everything = {0, 1, 2};
    const auto all = partial_label_loss(u, types, everything);
    CHECK(all.loss == 0.0);
    CHECK(all.best_noncandidate == -1);
  }

  TEST_CASE("translation error values") {
    const double zero[2] = {0.0, 0.0};
    CHECK(translation_error(zero, zero, zero, 2) == 0.0);
    const double m1[2] = {1.0, 1.0}, z[2] = {2.0, -1.0}, m2[2] = {3.0, 0.0};
    CHECK(translation_error(z, m1, m2, 2) == 0.0);
    const double m2b[2] = {0.0, -4.0};
    CHECK(translation_error(z, m1, m2b, 2) == doctest::Approx(25.0));
  }

  TEST_CASE("initialization bounds and determinism") {
    const auto p = small_problem({.sentences = 300, .test_sentences = 10, .seed = 5});
    const size_t d = 20;
    const auto a = init_model(p.graph, d, 9);
    const auto b = init_model(p.graph, d, 9);
    CHECK(serialize_model(a, true) == serialize_model(b, true));
    CHECK(serialize_model(a, true) != serialize_model(init_model(p.graph, d, 10), true));
    for (const auto* sv : {&a.relation, &a.entity}) {
      for (const auto* m : {&sv->mentions, &sv->features, &sv->types}) {
        for (double x : m->data()) {
          CHECK(x >= -0.5 / d);
          CHECK(x <= 0.5 / d);
        }
      }
    }
    CHECK_THROWS_WITH_AS(init_model(TrainingGraph{}, d, 1), doctest::Contains("no training signal"), Error);
  }

  TEST_CASE("corruption picks each slot uniformly") {
    const auto p = small_problem({.sentences = 300, .test_sentences = 10, .seed = 6});
    REQUIRE_FALSE(p.graph.triples.empty());
    Rng rng(12);
    size_t counts[3] = {0, 0, 0};
    size_t total = 0;
    for (int i = 0; i < 30000; ++i) {
      const Triple& t = p.graph.triples[static_cast<size_t>(i) % p.graph.triples.size()];
      Triple out;
      const int slot = corrupt_triple(t, p.graph, rng, out);
      if (slot < 0) continue;
      ++counts[slot];
      ++total;
      const uint32_t before[3] = {t.z, t.m1, t.m2}, after[3] = {out.z, out.m1, out.m2};
      for (int s = 0; s < 3; ++s) CHECK((s == slot) == (before[s] != after[s]));
    }
    for (size_t c : counts) {
      CHECK(std::abs(static_cast<double>(c) / static_cast<double>(total) - 1.0 / 3) <= 0.02);
    }
  }

  TEST_CASE("objective of the zero model") {
    const auto p = small_problem({.sentences = 300, .test_sentences = 10, .seed = 7});
    auto model = init_model(p.graph, 10, 1);
    for (auto* sv : {&model.relation, &model.entity}) {
      for (auto* m : {&sv->mentions, &sv->features, &sv->types}) std::fill(m->data().begin(), m->data().end(), 0.0);
    }
    ObjectiveOptions o;
    o.negatives = 4;
    const auto v = compute_objective(model, p.graph, o);
    auto expected = [&](const SpaceGraph& g) {
      double total = 0.0;
      for (double w : g.edge_weight) total += w * 5.0 * std::log(2.0);
      for (uint32_t i : g.trainable) total += g.candidates[i].size() < g.num_types ? 1.0 : 0.0;
      return total;
    };
    CHECK(v.o_z == doctest::Approx(expected(p.graph.relation)).epsilon(1e-9));
    CHECK(v.o_m == doctest::Approx(expected(p.graph.entity)).epsilon(1e-9));
    CHECK(v.o_zm > 0.0);
    CHECK(v.o_zm <= static_cast<double>(p.graph.triples.size() * 4));
    CHECK(std::fmod(v.o_zm, 1.0) == 0.0);
  }

  TEST_CASE("zero learning rate leaves vectors unchanged") {
    Rng rng(8);
    auto u = random_vector(rng, 4, 1.0), c = random_vector(rng, 4, 1.0), n = random_vector(rng, 4, 1.0);
    const auto u0 = u, c0 = c, n0 = n;
    std::vector<double*> np = {n.data()};
    step_second_order(u.data(), c.data(), np, 4, 0.0);
    Matrix types = random_matrix(rng, 3, 4, 1.0);
    const auto t0 = types.data();
    const std::vector<TypeId> cand = {0};
    step_partial_label(u.data(), types, cand, 0.0, 1e-4);
    CHECK(u == u0);
    CHECK(c == c0);
    CHECK(n == n0);
    CHECK(types.data() == t0);
  }

  TEST_CASE("model text round trip") {
    const auto p = small_problem({.sentences = 300, .test_sentences = 10, .seed = 5});
    const auto m = init_model(p.graph, 7, 3);
    const auto text = serialize_model(m);
    CHECK(serialize_model(parse_model(text)) == text);
    CHECK_THROWS_AS(parse_model("garbage\n"), InputError);
  }
}
