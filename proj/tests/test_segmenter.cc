#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

#include "cotype/segmenter.h"
#include "cotype/synthetic.h"
#include "doctest.h"
#include "fixtures.h"

using namespace cotype;
using namespace cotype::testing;

namespace {

struct Candidate {
  std::vector<size_t> lengths;
  double total = 0.0;
};

// Enumerates every composition of n into parts <= max_len. Totals are summed
// right to left, matching the suffix recursion so that equal sums compare
// exactly.
void enumerate(size_t pos, size_t n, size_t max_len, std::vector<size_t>& cur,
               const std::function<double(size_t, size_t)>& score, std::vector<Candidate>& out) {
  if (pos == n) {
    Candidate c{cur, 0.0};
    size_t start = n;
    for (size_t k = cur.size(); k-- > 0;) {
      start -= cur[k];
      c.total = score(start, cur[k]) + c.total;
    }
    out.push_back(std::move(c));
    return;
  }
  for (size_t len = 1; len <= max_len && pos + len <= n; ++len) {
    cur.push_back(len);
    enumerate(pos + len, n, max_len, cur, score, out);
    cur.pop_back();
  }
}

std::vector<size_t> brute_force(size_t n, size_t max_len, const std::function<double(size_t, size_t)>& score) {
  std::vector<Candidate> all;
  std::vector<size_t> cur;
  enumerate(0, n, max_len, cur, score, all);
  const auto best = std::max_element(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
    if (a.total != b.total) return a.total < b.total;
    if (a.lengths.size() != b.lengths.size()) return a.lengths.size() > b.lengths.size();
    return a.lengths < b.lengths;
  });
  return best->lengths;
}

std::vector<size_t> lengths_of(const Segmentation& s) {
  std::vector<size_t> out;
  for (const auto& sp : s.segments()) out.push_back(sp.size());
  return out;
}

Corpus repeated(const std::string& sentence, int times) {
  return corpus_from(std::vector<std::string>(times, sentence));
}

}  // namespace

TEST_SUITE("segmenter") {
  TEST_CASE("pattern mining respects support and length") {
    const auto c = repeated("Barack/NNP Obama/NNP spoke/VBD ./.", 5);
    const auto p = PatternTable::mine(c, 4, 3);
    CHECK(p.count("Barack Obama") == 5);
    CHECK(p.retained("Barack Obama spoke"));
    CHECK(p.pos_patterns().at("NNP NNP").count == 5);
    CHECK_FALSE(PatternTable::mine(c, 4, 6).retained("Barack Obama"));
    const auto uni = PatternTable::mine(c, 1, 3);
    for (const auto& [k, w] : uni.word_patterns()) CHECK(w.length == 1);
    CHECK(uni.total_tokens() == 20);
  }

  TEST_CASE("quality combination is the mean") {
    CHECK(combine_quality(0.8, 0.6) == doctest::Approx(0.7));
    CHECK(combine_quality(0.0, 0.0) == 0.0);
    CHECK(combine_quality(1.0, 1.0) == 1.0);
  }

  TEST_CASE("DP matches exhaustive search on random score tables") {
    Rng rng(2024);
    for (int trial = 0; trial < 500; ++trial) {
      const size_t n = 1 + rng.uniform_index(8);
      const size_t max_len = 1 + rng.uniform_index(4);
      std::vector<double> table(n * max_len);
      for (auto& x : table) x = -10.0 * rng.uniform01();
      auto score = [&](size_t i, size_t len) { return table[i * max_len + len - 1]; };
      const auto dp = viterbi_segment(n, max_len, score);
      CHECK(lengths_of(dp) == brute_force(n, max_len, score));
    }
  }

  TEST_CASE("DP tie rule: fewer segments, then longer leading segment") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
      const size_t n = 1 + rng.uniform_index(8);
      const size_t max_len = 1 + rng.uniform_index(4);
      std::vector<double> table(n * max_len);
      for (auto& x : table) x = -static_cast<double>(rng.uniform_index(3));  // many exact ties
      auto score = [&](size_t i, size_t len) { return table[i * max_len + len - 1]; };
      CHECK(lengths_of(viterbi_segment(n, max_len, score)) == brute_force(n, max_len, score));
    }
    auto flat = [](size_t, size_t) { return 0.0; };
    CHECK(lengths_of(viterbi_segment(5, 3, flat)) == std::vector<size_t>{3, 2});
  }

  TEST_CASE("single token sentence is one segment") {
    const auto s = viterbi_segment(1, 6, [](size_t, size_t) { return -1.0; });
    CHECK(s.boundaries == std::vector<uint32_t>{0, 1});
    CHECK(s.log_likelihood == -1.0);
  }

  TEST_CASE("segment score composition") {
    const auto c = running_example();
    const auto& s = c.sentence(0);
    std::vector<double> lp = {0.0, 0.6, 0.4};
    std::vector<std::unordered_map<std::string, double>> cond(3);
    cond[1]["Obama"] = 0.1;
    cond[2]["Barack Obama"] = 0.4;
    const SegmentPriors priors(lp, cond, 1e-6);
    CHECK(segment_log_score(s, {2, 4}, 0.5, priors) == doctest::Approx(std::log(0.4) + std::log(0.4) + std::log(0.5)));
    // Length-1 spans ignore Q.
    CHECK(segment_log_score(s, {3, 4}, 0.01, priors) == doctest::Approx(std::log(0.6) + std::log(0.1)));
    // Unseen surface and zero quality hit the floor.
    CHECK(segment_log_score(s, {4, 6}, 0.0, priors) ==
          doctest::Approx(std::log(0.4) + 2.0 * std::log(1e-6)));
    CHECK(segment_log_score(s, {2, 4}, kNotCandidate, priors) == -std::numeric_limits<double>::infinity());
  }

  TEST_CASE("prior re-estimation from a segmentation") {
    // Ten length-2 segments, four of them "Barack Obama".
    std::vector<std::string> sents;
    for (int i = 0; i < 4; ++i) sents.push_back("Barack/NNP Obama/NNP");
    for (int i = 0; i < 6; ++i) sents.push_back("New/NNP York/NNP");
    const auto c = corpus_from(sents);
    std::vector<Segmentation> seg(c.num_sentences());
    for (auto& s : seg) s.boundaries = {0, 2};
    const auto p = estimate_priors(c, seg, 3, 1e-6);
    double total = 0.0;
    for (size_t l = 1; l <= 3; ++l) total += p.length_prob(l);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.length_prob(2) == doctest::Approx(11.0 / 13.0));
    CHECK(p.conditional(2, "Barack Obama") == doctest::Approx(0.4).epsilon(1e-5));
    CHECK(p.conditional(2, "Obama Barack") == 1e-6);
  }

  TEST_CASE("hard EM does not lower the likelihood") {
    const auto data = generate_synthetic({.sentences = 400, .test_sentences = 10, .seed = 3});
    const auto patterns = PatternTable::mine(data.train, 6, 3);
    std::vector<SpanQuality> quality(data.train.num_sentences());
    for (size_t s = 0; s < quality.size(); ++s) {
      const auto& sent = data.train.sentence(s);
      quality[s].assign(sent.tokens.size() * 6, kNotCandidate);
      for (size_t i = 0; i < sent.tokens.size(); ++i) {
        for (size_t len = 1; len <= 6 && i + len <= sent.tokens.size(); ++len) {
          const Span sp{static_cast<uint32_t>(i), static_cast<uint32_t>(i + len)};
          if (len == 1 || patterns.retained(sent.surface(sp))) quality[s][i * 6 + len - 1] = 0.5;
        }
      }
    }
    auto priors = SegmentPriors::from_patterns(patterns, 1e-6);
    const auto trace = viterbi_training(data.train, quality, priors, 6, 4, 1e-6);
    REQUIRE(trace.size() == 4);
    for (size_t i = 2; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1] - 1e-6 * std::abs(trace[i - 1]));
  }

  TEST_CASE("quality examples come from KB aliases") {
    const auto c = repeated("Barack/NNP Obama/NNP spoke/VBD of/IN the/DT United/NNP States/NNP ./.", 5);
    const auto p = PatternTable::mine(c, 4, 3);
    const auto ex = build_quality_examples(p, toy_kb(), 100.0, 1);
    const std::set<std::string> pos(ex.phrase_positive.begin(), ex.phrase_positive.end());
    const std::set<std::string> neg(ex.phrase_negative.begin(), ex.phrase_negative.end());
    CHECK(pos.count("Barack Obama"));
    CHECK(pos.count("United States"));
    CHECK(neg.count("of the"));
    CHECK_FALSE(neg.count("Barack Obama"));
    CHECK(ex.pos_positive.size() == ex.phrase_positive.size());
  }

  TEST_CASE("no KB overlap is an error") {
    const auto c = repeated("the/DT cat/NN sat/VBD ./.", 5);
    const auto p = PatternTable::mine(c, 4, 3);
    CHECK_THROWS_WITH_AS(build_quality_examples(p, toy_kb(), 2.0, 1), doctest::Contains("no supervision"), Error);
  }

  TEST_CASE("random forest separates a threshold and rejects one class") {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
      const double x = rng.uniform01();
      rows.push_back({x, rng.uniform01()});
      labels.push_back(x > 0.5 ? 1 : 0);
    }
    const auto rf = RandomForest::train(rows, labels, {.num_trees = 20, .max_depth = 4, .seed = 1});
    CHECK(rf.predict(std::vector<double>{0.9, 0.5}) > 0.8);
    CHECK(rf.predict(std::vector<double>{0.1, 0.5}) < 0.2);
    CHECK_THROWS_WITH_AS(RandomForest::train(rows, std::vector<int>(rows.size(), 1), {}),
                         doctest::Contains("single class"), Error);
  }

  TEST_CASE("mention file round trip") {
    const auto c = running_example();
    const std::vector<MentionSpan> m = {{0, {0, 1}}, {0, {2, 4}}, {0, {9, 11}}};
    CHECK(parse_mentions(format_mentions(c, m), c) == m);
    CHECK_THROWS_AS(parse_mentions("d0\t0\t5\t40\tx\n", c), InputError);
  }

  TEST_CASE("planted mentions are recovered") {
    const auto data = generate_synthetic({.sentences = 3000, .test_sentences = 10, .seed = 11});
    SegmenterConfig cfg;
    cfg.num_trees = 30;
    const auto run = run_segmentation(data.train, data.kb, cfg);
    std::set<std::tuple<std::string, uint32_t, uint32_t, uint32_t>> gold, got;
    for (const auto& e : data.train_gold.entities) gold.insert({e.doc, e.sentence, e.span.start, e.span.end});
    for (const auto& m : run.mentions) {
      const auto& s = data.train.sentence(m.sentence);
      got.insert({s.doc_id, static_cast<uint32_t>(s.index), m.span.start, m.span.end});
    }
    size_t tp = 0;
    for (const auto& g : got) tp += gold.count(g);
    const double p = static_cast<double>(tp) / static_cast<double>(got.size());
    const double r = static_cast<double>(tp) / static_cast<double>(gold.size());
    CHECK(2 * p * r / (p + r) >= 0.9);
    CHECK(run.rounds >= 1);
  }
}
