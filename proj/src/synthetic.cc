#include "cotype/synthetic.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "cotype/util.h"

namespace cotype {
namespace {

struct Word {
  std::string text;
  std::string pos;
};

class WordFactory {
 public:
  explicit WordFactory(Rng& rng) : rng_(rng) {}

  std::string fresh(bool capitalized) {
    static const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "tr", "st", "kl"};
    static const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};
    while (true) {
      std::string w;
      const size_t syllables = 2 + rng_.uniform_index(2);
      for (size_t s = 0; s < syllables; ++s) {
        w += kOnsets[rng_.uniform_index(std::size(kOnsets))];
        w += kVowels[rng_.uniform_index(std::size(kVowels))];
      }
      if (rng_.bernoulli(0.5)) w += kOnsets[rng_.uniform_index(14)];
      if (capitalized) w[0] = static_cast<char>(w[0] - 'a' + 'A');
      if (used_.insert(ascii_lower(w)).second) return w;
    }
  }

 private:
  Rng& rng_;
  std::set<std::string> used_;
};

struct Entity {
  std::string id;
  std::vector<std::string> name;
  TypeId leaf = 0;
  bool in_kb = false;
};

struct Fact {
  size_t head = 0;
  size_t tail = 0;
  size_t relation = 0;
  bool noisy = false;
};

struct Generator {
  const SyntheticConfig& config;
  const TypeHierarchy& hierarchy;
  const std::vector<Entity>& entities;
  const std::vector<std::vector<Fact>>& facts;
  const std::vector<std::vector<Word>>& context;
  const std::vector<Word>& filler;
  const std::vector<Word>& connectors;
  const std::vector<Word>& shared;

  void add_entity(std::vector<Token>& tokens, const Entity& e, Span& span) const {
    span.start = static_cast<uint32_t>(tokens.size());
    for (const auto& t : e.name) tokens.push_back({t, "NNP"});
    span.end = static_cast<uint32_t>(tokens.size());
  }

  void add_words(std::vector<Token>& tokens, const std::vector<Word>& pool, size_t n, Rng& rng) const {
    for (size_t i = 0; i < n; ++i) {
      const Word& w = pool[rng.uniform_index(pool.size())];
      tokens.push_back({w.text, w.pos});
    }
  }

  std::vector<std::string> type_path(const Entity& e) const {
    std::vector<std::string> out;
    for (TypeId t : hierarchy.path_from_root(e.leaf)) out.push_back(hierarchy.entity_type_name(t));
    return out;
  }

  Corpus make(size_t num_sentences, Rng& rng, Annotations& gold, const std::string& doc_prefix) const {
    Corpus corpus;
    const std::string none(TypeHierarchy::kNoneName);
    const size_t per_doc = 20;
    for (size_t d = 0; d * per_doc < num_sentences; ++d) {
      const std::string doc = doc_prefix + std::to_string(d);
      std::vector<std::vector<Token>> sentences;
      for (size_t s = 0; s < per_doc && d * per_doc + s < num_sentences; ++s) {
        std::vector<Token> tokens;
        Span a, b;
        add_words(tokens, filler, rng.uniform_index(3), rng);
        size_t e1, e2;
        std::string type = none;
        if (rng.bernoulli(config.none_sentence_rate)) {
          e1 = rng.uniform_index(entities.size());
          do {
            e2 = rng.uniform_index(entities.size());
          } while (e2 == e1);
          add_entity(tokens, entities[e1], a);
          add_words(tokens, connectors, 1 + rng.uniform_index(2), rng);
          add_entity(tokens, entities[e2], b);
        } else {
          const size_t k = rng.uniform_index(facts.size());
          const Fact& f = facts[k][rng.uniform_index(facts[k].size())];
          e1 = f.head;
          e2 = f.tail;
          type = hierarchy.relation_type_name(static_cast<TypeId>(k));
          add_entity(tokens, entities[e1], a);
          auto cue = [&]() -> const std::vector<Word>& {
            return rng.bernoulli(config.shared_context_rate) ? shared : context[k];
          };
          add_words(tokens, cue(), 1, rng);
          if (rng.bernoulli(0.5)) add_words(tokens, filler, 1, rng);
          add_words(tokens, cue(), 1, rng);
          add_entity(tokens, entities[e2], b);
        }
        add_words(tokens, filler, rng.uniform_index(3), rng);
        tokens.push_back({".", "."});
        const uint32_t idx = static_cast<uint32_t>(sentences.size());
        gold.entities.push_back({doc, idx, a, type_path(entities[e1]), {}, 1.0});
        gold.entities.push_back({doc, idx, b, type_path(entities[e2]), {}, 1.0});
        gold.relations.push_back({doc, idx, a, b, type, {}, 1.0});
        gold.relations.push_back({doc, idx, b, a, none, {}, 1.0});
        sentences.push_back(std::move(tokens));
      }
      corpus.add_document(doc, std::move(sentences));
    }
    return corpus;
  }
};

}  // namespace

SyntheticDataset generate_synthetic(const SyntheticConfig& config) {
  if (config.relation_types < 1 || config.entity_types < 1 || config.sentences < 1 || config.entities_per_type < 2 ||
      config.facts_per_relation < 1 || config.name_vocab < 2 || config.context_vocab < 1 || config.filler_vocab < 1) {
    throw InputError("synthetic: sizes must be >= 1");
  }
  Rng rng(config.seed);
  WordFactory words(rng);

  // Hierarchy: about sqrt(K_e) top-level types, the rest spread under them.
  const size_t ke = config.entity_types;
  const size_t ntop = std::max<size_t>(1, static_cast<size_t>(std::lround(std::sqrt(static_cast<double>(ke)))));
  std::vector<TypeHierarchy::Edge> edges;
  auto type_name = [](size_t i) { return "type" + std::to_string(i); };
  for (size_t i = 0; i < ke; ++i) {
    edges.push_back({type_name(i), i < ntop ? std::string(TypeHierarchy::kRootName) : type_name(i % ntop), 0});
  }
  std::vector<std::string> rel_names;
  for (size_t k = 0; k < config.relation_types; ++k) rel_names.push_back("rel" + std::to_string(k));
  TypeHierarchy hierarchy = TypeHierarchy::build(edges, rel_names, "<synthetic>");

  std::vector<TypeId> leaves;
  for (size_t t = 0; t + 1 < hierarchy.num_entity_types(); ++t) {
    if (hierarchy.children(static_cast<TypeId>(t)).empty()) leaves.push_back(static_cast<TypeId>(t));
  }

  // Entities with names drawn from their leaf type's vocabulary.
  std::vector<Entity> entities;
  std::set<std::string> names;
  for (TypeId leaf : leaves) {
    std::vector<std::string> vocab;
    for (size_t i = 0; i < config.name_vocab; ++i) vocab.push_back(words.fresh(true));
    for (size_t n = 0; n < config.entities_per_type; ++n) {
      Entity e;
      e.leaf = leaf;
      do {
        e.name.clear();
        const size_t len = rng.bernoulli(0.7) ? 2 : 3;
        for (size_t i = 0; i < len; ++i) e.name.push_back(vocab[rng.uniform_index(vocab.size())]);
      } while (!names.insert(join(e.name, " ")).second);
      e.in_kb = rng.bernoulli(config.kb_coverage);
      entities.push_back(std::move(e));
    }
  }
  for (size_t i = 0; i < entities.size(); ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "e%05zu", i);
    entities[i].id = buf;
  }
  std::vector<std::vector<size_t>> by_leaf(hierarchy.num_entity_types());
  for (size_t i = 0; i < entities.size(); ++i) by_leaf[static_cast<size_t>(entities[i].leaf)].push_back(i);

  // Facts: relation k links a fixed head leaf type to a fixed tail leaf type.
  const size_t kr = config.relation_types;
  const size_t nl = leaves.size();
  std::vector<std::vector<Fact>> facts(kr);
  std::set<std::pair<size_t, size_t>> used_pairs;
  for (size_t k = 0; k < kr; ++k) {
    const auto& heads = by_leaf[static_cast<size_t>(leaves[k % nl])];
    const auto& tails = by_leaf[static_cast<size_t>(leaves[(2 * k + 1) % nl])];
    const size_t max_pairs = heads.size() * tails.size();
    for (size_t attempt = 0; facts[k].size() < config.facts_per_relation && attempt < 20 * max_pairs; ++attempt) {
      const size_t h = heads[rng.uniform_index(heads.size())];
      const size_t t = tails[rng.uniform_index(tails.size())];
      if (h == t || !used_pairs.insert({h, t}).second) continue;
      facts[k].push_back({h, t, k, rng.bernoulli(config.noise_rate)});
    }
    if (facts[k].empty()) throw InputError("synthetic: no entity pairs available for a relation type");
  }

  // Vocabularies: relation context words, filler, and None connectors.
  static const char* kContextPos[] = {"VBD", "IN", "VBN", "NN"};
  static const char* kFillerPos[] = {"DT", "JJ", "RB", "NN"};
  std::vector<std::vector<Word>> context(kr);
  for (size_t k = 0; k < kr; ++k) {
    for (size_t i = 0; i < config.context_vocab; ++i) context[k].push_back({words.fresh(false), kContextPos[i % 4]});
  }
  std::vector<Word> filler, connectors, shared;
  for (size_t i = 0; i < config.filler_vocab; ++i) filler.push_back({words.fresh(false), kFillerPos[i % 4]});
  for (size_t i = 0; i < std::max<size_t>(2, config.context_vocab); ++i) connectors.push_back({words.fresh(false), "CC"});
  for (size_t i = 0; i < config.context_vocab; ++i) shared.push_back({words.fresh(false), kContextPos[i % 4]});

  // Knowledge base over the covered entities.
  std::vector<KnowledgeBase::RawEntity> raw_entities;
  for (const auto& e : entities) {
    if (!e.in_kb) continue;
    std::vector<std::string> types;
    for (TypeId t : hierarchy.path_from_root(e.leaf)) types.push_back(hierarchy.entity_type_name(t));
    raw_entities.push_back({e.id, join(e.name, " "), {}, types, 0});
  }
  std::vector<KnowledgeBase::RawRelation> raw_relations;
  for (size_t k = 0; k < kr; ++k) {
    for (const Fact& f : facts[k]) {
      if (!entities[f.head].in_kb || !entities[f.tail].in_kb) continue;
      raw_relations.push_back({rel_names[k], entities[f.head].id, entities[f.tail].id, 0});
      if (f.noisy && kr > 1) raw_relations.push_back({rel_names[(k + 1) % kr], entities[f.head].id, entities[f.tail].id, 0});
    }
  }

  SyntheticDataset data{hierarchy, KnowledgeBase::build(hierarchy, raw_entities, raw_relations), {}, {}, {}, {}};
  const Generator gen{config, data.hierarchy, entities, facts, context, filler, connectors, shared};
  Rng train_rng(mix_seed(config.seed, 101));
  Rng test_rng(mix_seed(config.seed, 202));
  data.train = gen.make(config.sentences, train_rng, data.train_gold, "train");
  if (config.test_sentences > 0) data.test = gen.make(config.test_sentences, test_rng, data.test_gold, "test");
  return data;
}

void write_synthetic(const SyntheticDataset& data, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path p(dir);
  data.kb.save((p / "entities.tsv").string(), (p / "relations.tsv").string(), (p / "hierarchy.tsv").string());
  write_file((p / "train.conll").string(), data.train.serialize());
  write_file((p / "test.conll").string(), data.test.serialize());
  write_file((p / "train_gold.jsonl").string(), format_annotations(data.train_gold));
  write_file((p / "test_gold.jsonl").string(), format_annotations(data.test_gold));
}

}  // namespace cotype
