#ifndef COTYPE_KB_H_
#define COTYPE_KB_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cotype {

using TypeId = int32_t;
using EntityIndex = uint32_t;

inline constexpr TypeId kRootType = -1;

// Target entity type tree (under a synthetic root) plus the flat relation type
// set. Both spaces carry a reserved None label; it is a real id so that
// training and inference treat it like any other type.
class TypeHierarchy {
 public:
  static constexpr std::string_view kRootName = "ROOT";
  static constexpr std::string_view kNoneName = "None";
  static constexpr std::string_view kRelationTag = "RELATION";

  struct Edge {
    std::string child;
    std::string parent;
    size_t line = 0;
  };

  // Validates the tree (single parent, acyclic, connected to ROOT) and assigns
  // ids in lexicographic name order with None last in each space.
  static TypeHierarchy build(const std::vector<Edge>& edges, const std::vector<std::string>& relation_types,
                             const std::string& source = "<hierarchy>");
  static TypeHierarchy load(const std::string& path);

  size_t num_entity_types() const { return entity_names_.size(); }
  size_t num_relation_types() const { return relation_names_.size(); }
  TypeId none_entity_type() const { return static_cast<TypeId>(entity_names_.size() - 1); }
  TypeId none_relation_type() const { return static_cast<TypeId>(relation_names_.size() - 1); }

  const std::string& entity_type_name(TypeId t) const { return entity_names_.at(static_cast<size_t>(t)); }
  const std::string& relation_type_name(TypeId t) const { return relation_names_.at(static_cast<size_t>(t)); }
  std::optional<TypeId> find_entity_type(std::string_view name) const;
  std::optional<TypeId> find_relation_type(std::string_view name) const;

  // kRootType for top-level types and for None.
  TypeId parent(TypeId t) const { return parent_.at(static_cast<size_t>(t)); }
  // Children of t, ascending; kRootType yields the top-level types. None is
  // never a child of anything.
  const std::vector<TypeId>& children(TypeId t) const;
  // Types from the top level down to t, inclusive.
  std::vector<TypeId> path_from_root(TypeId t) const;
  int depth(TypeId t) const;

  // Writes the `child<TAB>parent` / `RELATION<TAB>type` format.
  std::string serialize() const;

 private:
  std::vector<std::string> entity_names_;
  std::vector<TypeId> parent_;
  std::vector<std::vector<TypeId>> children_;
  std::vector<TypeId> root_children_;
  std::vector<std::string> relation_names_;
  std::map<std::string, TypeId, std::less<>> entity_index_;
  std::map<std::string, TypeId, std::less<>> relation_index_;
};

struct EntityRecord {
  std::string entity_id;
  std::string canonical_name;
  std::vector<std::string> aliases;  // sorted, unique, contains canonical_name
  std::vector<TypeId> type_ids;      // sorted, unique
};

struct RelationInstanceRecord {
  TypeId relation_type = 0;
  EntityIndex head = 0;
  EntityIndex tail = 0;

  auto operator<=>(const RelationInstanceRecord&) const = default;
};

// Immutable after construction; safe for concurrent reads. Entities are
// indexed in lexicographic entity_id order, so index order is id order.
class KnowledgeBase {
 public:
  struct RawEntity {
    std::string entity_id;
    std::string canonical_name;
    std::vector<std::string> aliases;
    std::vector<std::string> types;
    size_t line = 0;
  };
  struct RawRelation {
    std::string relation_type;
    std::string head_id;
    std::string tail_id;
    size_t line = 0;
  };

  static KnowledgeBase build(TypeHierarchy hierarchy, std::vector<RawEntity> entities,
                             const std::vector<RawRelation>& relations);
  static KnowledgeBase load(const std::string& entity_file, const std::string& relation_file,
                            const std::string& hierarchy_file);
  void save(const std::string& entity_file, const std::string& relation_file,
            const std::string& hierarchy_file) const;

  const TypeHierarchy& hierarchy() const { return hierarchy_; }
  size_t num_entities() const { return entities_.size(); }
  size_t num_relation_instances() const { return relations_.size(); }
  const EntityRecord& entity(EntityIndex e) const { return entities_.at(e); }
  const std::vector<RelationInstanceRecord>& relation_instances() const { return relations_; }
  std::optional<EntityIndex> find_entity(std::string_view entity_id) const;

  // Entities whose alias set contains the surface: exact matches if any,
  // otherwise ASCII case-folded matches. Ascending entity_id.
  std::vector<EntityIndex> lookup_alias(std::string_view surface) const;

  // Alias-match linker: among lookup_alias hits, the entity with the most KB
  // facts, then the lowest entity_id.
  std::optional<EntityIndex> link(std::string_view surface) const;

  // Relation types r with r(head, tail) in the KB; ordered-pair semantics.
  const std::vector<TypeId>& relations_between(EntityIndex head, EntityIndex tail) const;
  std::vector<TypeId> relations_between(std::string_view head_id, std::string_view tail_id) const;

  size_t fact_count(EntityIndex e) const { return fact_count_.at(e); }

  const std::map<std::string, std::vector<EntityIndex>, std::less<>>& exact_alias_index() const { return exact_alias_; }
  const std::map<std::string, std::vector<EntityIndex>, std::less<>>& folded_alias_index() const { return folded_alias_; }
  const std::map<std::pair<EntityIndex, EntityIndex>, std::vector<TypeId>>& fact_index() const { return facts_; }

 private:
  TypeHierarchy hierarchy_;
  std::vector<EntityRecord> entities_;
  std::vector<RelationInstanceRecord> relations_;
  std::vector<size_t> fact_count_;
  std::map<std::string, EntityIndex, std::less<>> id_index_;
  std::map<std::string, std::vector<EntityIndex>, std::less<>> exact_alias_;
  std::map<std::string, std::vector<EntityIndex>, std::less<>> folded_alias_;
  std::map<std::pair<EntityIndex, EntityIndex>, std::vector<TypeId>> facts_;
};

}  // namespace cotype

#endif  // COTYPE_KB_H_
