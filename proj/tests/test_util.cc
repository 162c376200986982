#include <algorithm>
#include <cmath>
#include <vector>

#include "cotype/alias_table.h"
#include "cotype/util.h"
#include "doctest.h"
#include "stats.h"

using namespace cotype;
using namespace cotype::testing;

TEST_SUITE("util") {
  TEST_CASE("rng streams are reproducible and seed dependent") {
    Rng a(42), b(42), c(43);
    std::vector<uint64_t> xa, xb, xc;
    for (int i = 0; i < 100; ++i) {
      xa.push_back(a.next());
      xb.push_back(b.next());
      xc.push_back(c.next());
    }
    CHECK(xa == xb);
    CHECK(xa != xc);
  }

  TEST_CASE("uniform draws stay in range") {
    Rng rng(7);
    for (int i = 0; i < 10000; ++i) {
      const double u = rng.uniform01();
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
      CHECK(rng.uniform_index(3) < 3);
    }
  }

  TEST_CASE("uniform_index is uniform") {
    Rng rng(11);
    std::vector<size_t> counts(6, 0);
    for (int i = 0; i < 600000; ++i) ++counts[rng.uniform_index(6)];
    CHECK(chi_square_gof(counts, std::vector<double>(6, 1.0 / 6)) > 0.01);
  }

  TEST_CASE("mix_seed separates salts") {
    CHECK(mix_seed(1, 1) != mix_seed(1, 2));
    CHECK(mix_seed(1, 1) != mix_seed(2, 1));
    CHECK(mix_seed(5, 9) == mix_seed(5, 9));
  }

  TEST_CASE("fnv1a64 reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
    CHECK(hex64(0xabcULL) == "0000000000000abc");
  }

  TEST_CASE("string helpers") {
    CHECK(split("a\tb\t", '\t') == std::vector<std::string>{"a", "b", ""});
    CHECK(join({"x", "y", "z"}, "|") == "x|y|z");
    CHECK(trim("  hi \r\n") == "hi");
    CHECK(ascii_lower("MiXeD") == "mixed");
    CHECK(starts_with_upper("Obama"));
    CHECK_FALSE(starts_with_upper("obama"));
  }

  TEST_CASE("read_file names a missing path") {
    try {
      read_file("/nonexistent/cotype.txt");
      FAIL("expected InputError");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("/nonexistent/cotype.txt") != std::string::npos);
    }
  }

  TEST_CASE("parallel_for visits every index once") {
    for (int threads : {1, 3}) {
      std::vector<int> hits(1000, 0);
      parallel_for(hits.size(), threads, [&](size_t i) { ++hits[i]; });
      CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
  }

  TEST_CASE("alias table construction reproduces the weights") {
    const std::vector<double> w = {3.0, 0.0, 1.0, 6.0, 0.5};
    AliasTable t(w);
    double total = 0.0;
    for (double x : w) total += x;
    for (size_t i = 0; i < w.size(); ++i) {
      CHECK(t.probability(i) == doctest::Approx(w[i] / total).epsilon(1e-12));
      CHECK(t.implied_probability(i) == doctest::Approx(w[i] / total).epsilon(1e-12));
    }
  }

  TEST_CASE("single outcome table always returns it") {
    AliasTable t(std::vector<double>{2.5});
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) CHECK(t.sample(rng) == 0);
  }

  TEST_CASE("noise table over D_f 1 and 16 draws 1:8") {
    const std::vector<double> w = {std::pow(1.0, 0.75), std::pow(16.0, 0.75)};
    AliasTable t(w);
    Rng rng(99);
    size_t counts[2] = {0, 0};
    for (int i = 0; i < 100000; ++i) ++counts[t.sample(rng)];
    const double ratio = static_cast<double>(counts[1]) / static_cast<double>(counts[0]);
    CHECK(ratio == doctest::Approx(8.0).epsilon(0.05));
  }

  TEST_CASE("alias draws match an inverse-CDF sampler") {
    std::vector<double> w;
    Rng gen(5);
    for (int i = 0; i < 10; ++i) w.push_back(std::pow(1.0 + static_cast<double>(gen.uniform_index(50)), 0.75));
    AliasTable t(w);
    std::vector<double> cdf;
    double acc = 0.0;
    for (double x : w) cdf.push_back(acc += x);
    Rng ra(17), rb(18);
    std::vector<size_t> alias_counts(w.size(), 0), cdf_counts(w.size(), 0);
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) {
      ++alias_counts[t.sample(ra)];
      const double u = rb.uniform01() * acc;
      ++cdf_counts[static_cast<size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin())];
    }
    CHECK(chi_square_two_sample(alias_counts, cdf_counts) > 0.01);
    std::vector<double> p;
    for (double x : w) p.push_back(x / acc);
    CHECK(chi_square_gof(alias_counts, p) > 0.01);
  }

  TEST_CASE("chi-square tail matches reference quantiles") {
    // Upper 1% points of the chi-square distribution.
    CHECK(chi_square_pvalue(6.634897, 1) == doctest::Approx(0.01).epsilon(1e-4));
    CHECK(chi_square_pvalue(21.665994, 9) == doctest::Approx(0.01).epsilon(1e-4));
    CHECK(chi_square_pvalue(0.0, 4) == doctest::Approx(1.0));
  }
}
