#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

#include "cotype/util.h"
#include "doctest.h"
#include "fixtures.h"
#include "json.hpp"

using namespace cotype;
using namespace cotype::testing;

namespace {

// Runs the CLI with stdout and stderr captured; returns the exit status.
int run_cli(const std::string& args, const TempDir& dir, std::string* err = nullptr) {
  const std::string errfile = dir.file("stderr.txt");
  const std::string cmd = std::string(COTYPE_CLI_PATH) + " " + args + " >" + dir.file("stdout.txt") + " 2>" + errfile;
  const int status = std::system(cmd.c_str());
  if (err) *err = read_file(errfile);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string kb_args(const std::string& data) {
  return " --kb-entities " + data + "/entities.tsv --kb-relations " + data + "/relations.tsv --hierarchy " + data +
         "/hierarchy.tsv";
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("missing input file exits 2 and names it") {
    TempDir dir("cli-missing");
    const std::string gold = dir.write("gold.jsonl", "");
    std::string err;
    const int code = run_cli("evaluate --gold " + gold + " --predictions " + dir.file("nope.jsonl") + " --run-dir " +
                                 dir.file("run"),
                             dir, &err);
    CHECK(code == 2);
    CHECK(err.find("nope.jsonl") != std::string::npos);
  }

  TEST_CASE("unknown subcommand is a usage error") {
    TempDir dir("cli-usage");
    CHECK(run_cli("frobnicate", dir) != 0);
  }

  TEST_CASE("toy pipeline end to end, and seeded training repeats") {
    TempDir dir("cli-pipe");
    const std::string data = dir.file("data");
    REQUIRE(run_cli("synth --sentences 600 --test-sentences 60 --seed 3 --out " + data, dir) == 0);
    const std::string run = dir.file("run");
    REQUIRE(run_cli("pipeline --corpus " + data + "/train.conll" + kb_args(data) + " --test-corpus " + data +
                        "/test.conll --gold " + data + "/test_gold.jsonl --run-dir " + run,
                    dir) == 0);
    for (const char* f : {"config.json", "mentions.tsv", "dl_relations.jsonl", "relation_features.tsv", "model.txt",
                          "predictions.jsonl", "metrics.json", "pr_curve.tsv"}) {
      CHECK_MESSAGE(std::filesystem::exists(run + "/" + f), f);
    }
    const auto metrics = nlohmann::json::parse(read_file(run + "/metrics.json"));
    CHECK(metrics.contains("relation_classification_accuracy"));
    CHECK(metrics.contains("entity_typing"));

    std::string models[2];
    for (int i = 0; i < 2; ++i) {
      const std::string out = dir.file("train" + std::to_string(i));
      REQUIRE(run_cli("train --seed 7 --corpus " + data + "/train.conll --hierarchy " + data +
                          "/hierarchy.tsv --labeled " + run + " --features " + run + " --run-dir " + out,
                      dir) == 0);
      models[i] = read_file(out + "/model.txt");
    }
    CHECK(models[0] == models[1]);
    CHECK_FALSE(models[0].empty());
  }
}
