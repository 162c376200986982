#ifndef COTYPE_LABELER_H_
#define COTYPE_LABELER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cotype/corpus.h"
#include "cotype/kb.h"
#include "cotype/segmenter.h"

namespace cotype {

struct EntityMention {
  uint32_t id = 0;
  size_t sentence = 0;
  Span span;
  std::string surface;
  std::optional<EntityIndex> entity;
  std::vector<TypeId> types;  // KB types when linked, {None} when sampled as a None example
};

// Ordered pair (arg1, arg2) of entity mentions in one sentence.
struct RelationMention {
  uint32_t id = 0;
  uint32_t arg1 = 0;
  uint32_t arg2 = 0;
  size_t sentence = 0;
  std::vector<TypeId> types;  // candidate set R_i
};

struct LinkPartition {
  std::vector<uint32_t> linked;
  std::vector<uint32_t> unlinkable;
};

// Builds entity mentions in (sentence, span) order with dense ids.
std::vector<EntityMention> make_entity_mentions(const Corpus& corpus, std::vector<MentionSpan> spans);

// Links each mention by alias and, when linked, assigns all KB types of the
// entity as candidates.
LinkPartition link_mentions(std::vector<EntityMention>& mentions, const KnowledgeBase& kb);

// Both ordered pairs for every unordered pair of mentions sharing a sentence.
std::vector<RelationMention> generate_relation_mentions(const std::vector<EntityMention>& mentions);

struct CandidateAssignment {
  std::vector<RelationMention> linked;     // Z_L: both args linked, R_i nonempty
  std::vector<RelationMention> none_pool;  // both args linked, no KB relation
  std::vector<RelationMention> unlabeled;  // Z_U: some arg unlinked
};

CandidateAssignment assign_candidate_types(std::vector<RelationMention> relations,
                                           const std::vector<EntityMention>& mentions, const KnowledgeBase& kb);

// Seeded uniform sample without replacement of floor(|pool| * ratio) indices,
// returned in ascending order.
std::vector<size_t> sample_none_examples(size_t pool_size, double ratio, uint64_t seed);

struct LabelStats {
  size_t num_relation_mentions = 0;  // N_L
  size_t num_entity_mentions = 0;    // N'_L
  size_t num_none_relations = 0;
  size_t num_none_entities = 0;
  size_t num_unlabeled_relations = 0;
  size_t num_detected_mentions = 0;
  std::map<std::string, size_t> relation_type_histogram;
  std::map<std::string, size_t> entity_type_histogram;
  double multi_relation_fraction = 0.0;  // Z_L mentions with >= 2 candidate relation types
  double multi_sibling_fraction = 0.0;   // linked entity mentions with >= 2 sibling types
};

struct LabelerConfig {
  double none_ratio = 0.3;
  uint64_t seed = 1;
};

// D_L: Z_L with candidate sets, None-labeled relation and entity samples, and
// the unlabeled pool.
struct LabeledCorpus {
  std::vector<EntityMention> mentions;       // indexed by id
  std::vector<RelationMention> relations;    // Z_L
  std::vector<RelationMention> none_relations;
  std::vector<RelationMention> unlabeled;    // Z_U
  std::vector<uint32_t> linked_entities;     // M_L mention ids
  std::vector<uint32_t> none_entities;       // sampled unlinkable mention ids
  LabelStats stats;
};

LabeledCorpus build_labeled_corpus(const Corpus& corpus, std::vector<MentionSpan> spans, const KnowledgeBase& kb,
                                   const LabelerConfig& config);

double multi_candidate_fraction(const std::vector<RelationMention>& relations);
LabelStats compute_label_stats(const LabeledCorpus& dl, const TypeHierarchy& hierarchy);

// JSON-lines: one record per training relation mention (Z_L and None
// samples), one per linked entity mention, one per None entity sample.
struct LabeledCorpusFiles {
  std::string relations;
  std::string entities;
  std::string none_entities;
};
LabeledCorpusFiles serialize_labeled_corpus(const LabeledCorpus& dl, const Corpus& corpus,
                                            const TypeHierarchy& hierarchy);
LabeledCorpus parse_labeled_corpus(const LabeledCorpusFiles& files, const Corpus& corpus,
                                   const TypeHierarchy& hierarchy);
std::string label_stats_json(const LabelStats& stats);

}  // namespace cotype

#endif  // COTYPE_LABELER_H_
