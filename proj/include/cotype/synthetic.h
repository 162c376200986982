#ifndef COTYPE_SYNTHETIC_H_
#define COTYPE_SYNTHETIC_H_

#include <cstdint>
#include <string>

#include "cotype/corpus.h"
#include "cotype/evaluation.h"
#include "cotype/kb.h"

namespace cotype {

// Planted-type corpus: entities with type-specific name vocabularies,
// relations with their own context words, and a KB that covers part of the
// entities. A noisy fact pair also carries a partner relation in the KB, so
// its mentions get two candidate relation types while expressing one.
struct SyntheticConfig {
  size_t relation_types = 5;
  size_t entity_types = 10;
  size_t sentences = 20000;
  size_t test_sentences = 2000;
  double noise_rate = 0.3;
  double kb_coverage = 0.8;  // fraction of entities present in the KB
  double none_sentence_rate = 0.2;
  double shared_context_rate = 0.0;  // chance a context slot uses the relation-agnostic pool
  size_t entities_per_type = 40;
  size_t facts_per_relation = 400;
  size_t name_vocab = 24;  // name tokens per entity type
  size_t context_vocab = 40;  // context words per relation type
  size_t filler_vocab = 200;
  uint64_t seed = 1;
};

struct SyntheticDataset {
  TypeHierarchy hierarchy;
  KnowledgeBase kb;
  Corpus train;
  Corpus test;
  Annotations train_gold;
  Annotations test_gold;
};

SyntheticDataset generate_synthetic(const SyntheticConfig& config);

// Writes hierarchy.tsv, entities.tsv, relations.tsv, train.conll,
// test.conll, train_gold.jsonl and test_gold.jsonl into dir.
void write_synthetic(const SyntheticDataset& data, const std::string& dir);

}  // namespace cotype

#endif  // COTYPE_SYNTHETIC_H_
