#include "cotype/labeler.h"
#include "cotype/synthetic.h"
#include "doctest.h"
#include "fixtures.h"
#include "graph_fixture.h"

using namespace cotype;
using namespace cotype::testing;

namespace {

LabeledCorpus label_gold(const SyntheticDataset& d) {
  return build_labeled_corpus(d.train, gold_spans(d.train, d.train_gold), d.kb, {});
}

}  // namespace

TEST_SUITE("synthetic") {
  TEST_CASE("no noise gives singleton candidate sets") {
    const auto d = generate_synthetic({.sentences = 1500, .test_sentences = 10, .noise_rate = 0.0, .seed = 4});
    const auto dl = label_gold(d);
    REQUIRE_FALSE(dl.relations.empty());
    for (const auto& r : dl.relations) CHECK(r.types.size() == 1);
  }

  TEST_CASE("noise rate controls the multi-candidate share") {
    const auto d = generate_synthetic({.sentences = 4000, .test_sentences = 10, .noise_rate = 0.4, .seed = 5});
    CHECK(multi_candidate_fraction(label_gold(d).relations) == doctest::Approx(0.4).epsilon(0.05 / 0.4));
  }

  TEST_CASE("same seed, same data") {
    const SyntheticConfig c{.sentences = 500, .test_sentences = 50, .seed = 9};
    const auto a = generate_synthetic(c), b = generate_synthetic(c);
    CHECK(a.train.serialize() == b.train.serialize());
    CHECK(a.test.serialize() == b.test.serialize());
    CHECK(format_annotations(a.train_gold) == format_annotations(b.train_gold));
    CHECK(a.kb.relation_instances() == b.kb.relation_instances());
    auto c2 = c;
    c2.seed = 10;
    CHECK(generate_synthetic(c2).train.serialize() != a.train.serialize());
  }

  TEST_CASE("gold spans lie inside their sentences") {
    const auto d = generate_synthetic({.sentences = 300, .test_sentences = 30, .seed = 1});
    for (const auto* pair : {&d.train_gold, &d.test_gold}) {
      const Corpus& c = pair == &d.train_gold ? d.train : d.test;
      for (const auto& e : pair->entities) {
        const auto s = c.find_sentence(e.doc, e.sentence);
        REQUIRE(s.has_value());
        CHECK(e.span.end <= c.sentence(*s).tokens.size());
        CHECK_FALSE(e.types.empty());
      }
    }
  }

  TEST_CASE("written files load back") {
    TempDir dir("synth");
    const auto d = generate_synthetic({.sentences = 200, .test_sentences = 20, .seed = 2});
    write_synthetic(d, dir.path().string());
    const auto kb = KnowledgeBase::load(dir.file("entities.tsv"), dir.file("relations.tsv"), dir.file("hierarchy.tsv"));
    CHECK(kb.num_entities() == d.kb.num_entities());
    CHECK(Corpus::load(dir.file("train.conll")).num_tokens() == d.train.num_tokens());
  }
}
