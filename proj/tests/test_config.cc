#include "cotype/config.h"
#include "doctest.h"
#include "fixtures.h"

using namespace cotype;
using namespace cotype::testing;

TEST_SUITE("config") {
  TEST_CASE("defaults carry the published hyperparameters") {
    const RunConfig c;
    CHECK(c.train.alpha == 0.025);
    CHECK(c.train.lambda == 1e-4);
    CHECK(c.train.convergence_tol == 1e-4);
    CHECK(c.inference.eta == 0.35);
    CHECK(c.labeler.none_ratio == 0.3);
  }

  TEST_CASE("json round trip") {
    RunConfig c;
    c.seed = 99;
    c.train.dim = 20;
    c.inference.eta_entity = 0.2;
    c.segmenter.max_len = 4;
    c.paths.corpus = "x.conll";
    CHECK(dump_config(config_from_json(config_to_json(c))) == dump_config(c));
  }

  TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"train": {"dimension": 3}})")), InputError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"bogus": 1})")), InputError);
  }

  TEST_CASE("missing keys keep defaults and load reads files") {
    TempDir dir("cfg");
    const auto path = dir.write("c.json", R"({"seed": 5, "train": {"dim": 12}})");
    const auto c = load_config(path);
    CHECK(c.seed == 5);
    CHECK(c.train.dim == 12);
    CHECK(c.train.alpha == 0.025);
  }

  TEST_CASE("hash ignores paths") {
    RunConfig a, b;
    b.paths.corpus = "elsewhere.conll";
    CHECK(config_hash(a) == config_hash(b));
    b.train.dim = 7;
    CHECK(config_hash(a) != config_hash(b));
  }

  TEST_CASE("global seed fans out to distinct module streams") {
    RunConfig c;
    c.seed = 31;
    c.threads = 2;
    propagate_globals(c);
    CHECK(c.segmenter.seed == mix_seed(31, 1));
    CHECK(c.labeler.seed == mix_seed(31, 2));
    CHECK(c.train.seed == mix_seed(31, 3));
    CHECK(c.segmenter.threads == 2);
    CHECK(c.train.threads == 2);
  }
}
