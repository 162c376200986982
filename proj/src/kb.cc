#include "cotype/kb.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "cotype/util.h"

namespace cotype {
namespace {

struct DataLine {
  size_t number;
  std::string text;
};

// Non-blank, non-comment lines with their 1-based line numbers.
std::vector<DataLine> data_lines(const std::string& content) {
  std::vector<DataLine> out;
  size_t number = 0;
  size_t start = 0;
  while (start <= content.size()) {
    size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    ++number;
    std::string_view line(content.data() + start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!trim(line).empty() && line.front() != '#') out.push_back({number, std::string(line)});
    if (end == content.size()) break;
    start = end + 1;
  }
  return out;
}

std::string where(const std::string& source, size_t line) {
  return line ? source + ":" + std::to_string(line) + ": " : source + ": ";
}

std::vector<std::string> split_list(const std::string& field) {
  std::vector<std::string> out;
  if (field.empty()) return out;
  for (auto& item : split(field, '|')) {
    auto t = trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

}  // namespace

TypeHierarchy TypeHierarchy::build(const std::vector<Edge>& edges, const std::vector<std::string>& relation_types,
                                   const std::string& source) {
  std::map<std::string, std::string> parent_of;
  std::set<std::string> parents_seen;
  for (const auto& e : edges) {
    const std::string at = where(source, e.line);
    if (e.child == kRootName || e.child == kNoneName || e.parent == kNoneName) {
      throw InputError(at + "reserved type name in hierarchy edge " + e.child + " -> " + e.parent);
    }
    if (e.child.empty() || e.parent.empty()) throw InputError(at + "empty type name");
    if (e.child == e.parent) throw InputError(at + "cycle at " + e.parent + "→" + e.child);
    for (std::string cur = e.parent; cur != kRootName;) {
      auto it = parent_of.find(cur);
      if (it == parent_of.end()) break;
      if (it->second == e.child) throw InputError(at + "cycle at " + e.parent + "→" + e.child);
      cur = it->second;
    }
    if (parent_of.count(e.child)) {
      throw InputError(at + "type " + e.child + " has more than one parent");
    }
    parent_of[e.child] = e.parent;
    if (e.parent != kRootName) parents_seen.insert(e.parent);
  }
  for (const auto& p : parents_seen) {
    if (!parent_of.count(p)) throw InputError(where(source, 0) + "type " + p + " is not connected to ROOT");
  }

  TypeHierarchy h;
  for (const auto& [name, parent] : parent_of) {
    h.entity_index_.emplace(name, static_cast<TypeId>(h.entity_names_.size()));
    h.entity_names_.push_back(name);
  }
  h.entity_index_.emplace(std::string(kNoneName), static_cast<TypeId>(h.entity_names_.size()));
  h.entity_names_.emplace_back(kNoneName);
  h.parent_.assign(h.entity_names_.size(), kRootType);
  h.children_.assign(h.entity_names_.size(), {});
  for (const auto& [name, parent] : parent_of) {
    const TypeId id = h.entity_index_.at(name);
    if (parent == kRootName) {
      h.root_children_.push_back(id);
    } else {
      const TypeId pid = h.entity_index_.at(parent);
      h.parent_[static_cast<size_t>(id)] = pid;
      h.children_[static_cast<size_t>(pid)].push_back(id);
    }
  }
  for (auto& c : h.children_) std::sort(c.begin(), c.end());
  std::sort(h.root_children_.begin(), h.root_children_.end());

  std::set<std::string> rels;
  for (const auto& r : relation_types) {
    if (r == kNoneName) throw InputError(where(source, 0) + "relation type name None is reserved");
    if (r.empty()) throw InputError(where(source, 0) + "empty relation type name");
    rels.insert(r);
  }
  for (const auto& r : rels) {
    h.relation_index_.emplace(r, static_cast<TypeId>(h.relation_names_.size()));
    h.relation_names_.push_back(r);
  }
  h.relation_index_.emplace(std::string(kNoneName), static_cast<TypeId>(h.relation_names_.size()));
  h.relation_names_.emplace_back(kNoneName);
  return h;
}

TypeHierarchy TypeHierarchy::load(const std::string& path) {
  std::vector<Edge> edges;
  std::vector<std::string> relations;
  for (const auto& line : data_lines(read_file(path))) {
    auto cols = split(line.text, '\t');
    if (cols.size() != 2) {
      throw InputError(where(path, line.number) + "expected 2 tab-separated columns, got " +
                       std::to_string(cols.size()));
    }
    std::string a(trim(cols[0])), b(trim(cols[1]));
    if (a == kRelationTag) {
      relations.push_back(b);
    } else {
      edges.push_back({a, b, line.number});
    }
  }
  return build(edges, relations, path);
}

std::optional<TypeId> TypeHierarchy::find_entity_type(std::string_view name) const {
  auto it = entity_index_.find(name);
  if (it == entity_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<TypeId> TypeHierarchy::find_relation_type(std::string_view name) const {
  auto it = relation_index_.find(name);
  if (it == relation_index_.end()) return std::nullopt;
  return it->second;
}

const std::vector<TypeId>& TypeHierarchy::children(TypeId t) const {
  if (t == kRootType) return root_children_;
  return children_.at(static_cast<size_t>(t));
}

std::vector<TypeId> TypeHierarchy::path_from_root(TypeId t) const {
  std::vector<TypeId> path;
  for (TypeId cur = t; cur != kRootType; cur = parent(cur)) path.push_back(cur);
  std::reverse(path.begin(), path.end());
  return path;
}

int TypeHierarchy::depth(TypeId t) const { return static_cast<int>(path_from_root(t).size()); }

std::string TypeHierarchy::serialize() const {
  std::ostringstream out;
  // Breadth-first so every parent line precedes its children.
  std::vector<TypeId> frontier = root_children_;
  while (!frontier.empty()) {
    std::vector<TypeId> next;
    for (TypeId t : frontier) {
      const TypeId p = parent(t);
      out << entity_type_name(t) << '\t' << (p == kRootType ? std::string(kRootName) : entity_type_name(p))
          << '\n';
      for (TypeId c : children(t)) next.push_back(c);
    }
    frontier = std::move(next);
  }
  for (TypeId r = 0; r < none_relation_type(); ++r) out << kRelationTag << '\t' << relation_type_name(r) << '\n';
  return out.str();
}

KnowledgeBase KnowledgeBase::build(TypeHierarchy hierarchy, std::vector<RawEntity> entities,
                                   const std::vector<RawRelation>& relations) {
  KnowledgeBase kb;
  kb.hierarchy_ = std::move(hierarchy);
  std::sort(entities.begin(), entities.end(),
            [](const RawEntity& a, const RawEntity& b) { return a.entity_id < b.entity_id; });
  for (size_t i = 0; i < entities.size(); ++i) {
    const auto& raw = entities[i];
    const std::string at = where("entity file", raw.line);
    if (raw.entity_id.empty()) throw InputError(at + "empty entity id");
    if (i > 0 && entities[i - 1].entity_id == raw.entity_id) {
      throw InputError(at + "duplicate entity_id " + raw.entity_id);
    }
    EntityRecord rec;
    rec.entity_id = raw.entity_id;
    rec.canonical_name = raw.canonical_name;
    std::set<std::string> aliases(raw.aliases.begin(), raw.aliases.end());
    if (!raw.canonical_name.empty()) aliases.insert(raw.canonical_name);
    rec.aliases.assign(aliases.begin(), aliases.end());
    std::set<TypeId> types;
    for (const auto& t : raw.types) {
      auto id = kb.hierarchy_.find_entity_type(t);
      if (!id || *id == kb.hierarchy_.none_entity_type()) {
        throw InputError(at + "entity " + raw.entity_id + " references unknown type " + t);
      }
      types.insert(*id);
    }
    rec.type_ids.assign(types.begin(), types.end());
    kb.id_index_.emplace(rec.entity_id, static_cast<EntityIndex>(i));
    kb.entities_.push_back(std::move(rec));
  }

  std::set<RelationInstanceRecord> unique;
  for (const auto& raw : relations) {
    const std::string at = where("relation file", raw.line);
    auto rel = kb.hierarchy_.find_relation_type(raw.relation_type);
    if (!rel || *rel == kb.hierarchy_.none_relation_type()) {
      throw InputError(at + "unknown relation type " + raw.relation_type);
    }
    auto head = kb.find_entity(raw.head_id);
    if (!head) throw InputError(at + "relation references unknown entity " + raw.head_id);
    auto tail = kb.find_entity(raw.tail_id);
    if (!tail) throw InputError(at + "relation references unknown entity " + raw.tail_id);
    unique.insert({*rel, *head, *tail});
  }
  kb.relations_.assign(unique.begin(), unique.end());
  kb.fact_count_.assign(kb.entities_.size(), 0);
  for (const auto& r : kb.relations_) {
    kb.facts_[{r.head, r.tail}].push_back(r.relation_type);
    ++kb.fact_count_[r.head];
    if (r.tail != r.head) ++kb.fact_count_[r.tail];
  }
  for (auto& [pair, types] : kb.facts_) std::sort(types.begin(), types.end());

  for (EntityIndex e = 0; e < kb.entities_.size(); ++e) {
    for (const auto& alias : kb.entities_[e].aliases) {
      kb.exact_alias_[alias].push_back(e);
      auto& folded = kb.folded_alias_[ascii_lower(alias)];
      if (folded.empty() || folded.back() != e) folded.push_back(e);
    }
  }
  return kb;
}

KnowledgeBase KnowledgeBase::load(const std::string& entity_file, const std::string& relation_file,
                                  const std::string& hierarchy_file) {
  TypeHierarchy hierarchy = TypeHierarchy::load(hierarchy_file);
  std::vector<RawEntity> entities;
  for (const auto& line : data_lines(read_file(entity_file))) {
    auto cols = split(line.text, '\t');
    if (cols.size() != 4) {
      throw InputError(where(entity_file, line.number) + "expected 4 tab-separated columns, got " +
                       std::to_string(cols.size()));
    }
    entities.push_back({std::string(trim(cols[0])), std::string(trim(cols[1])), split_list(cols[2]),
                        split_list(cols[3]), line.number});
  }
  std::vector<RawRelation> relations;
  for (const auto& line : data_lines(read_file(relation_file))) {
    auto cols = split(line.text, '\t');
    if (cols.size() != 3) {
      throw InputError(where(relation_file, line.number) + "expected 3 tab-separated columns, got " +
                       std::to_string(cols.size()));
    }
    relations.push_back(
        {std::string(trim(cols[0])), std::string(trim(cols[1])), std::string(trim(cols[2])), line.number});
  }
  try {
    return build(std::move(hierarchy), std::move(entities), relations);
  } catch (const InputError& e) {
    // Attribute to the right file.
    std::string msg = e.what();
    if (msg.rfind("entity file", 0) == 0) msg.replace(0, 11, entity_file);
    if (msg.rfind("relation file", 0) == 0) msg.replace(0, 13, relation_file);
    throw InputError(msg);
  }
}

void KnowledgeBase::save(const std::string& entity_file, const std::string& relation_file,
                         const std::string& hierarchy_file) const {
  std::ostringstream ents;
  for (const auto& e : entities_) {
    std::vector<std::string> types;
    for (TypeId t : e.type_ids) types.push_back(hierarchy_.entity_type_name(t));
    ents << e.entity_id << '\t' << e.canonical_name << '\t' << join(e.aliases, "|") << '\t' << join(types, "|")
         << '\n';
  }
  std::ostringstream rels;
  for (const auto& r : relations_) {
    rels << hierarchy_.relation_type_name(r.relation_type) << '\t' << entities_[r.head].entity_id << '\t'
         << entities_[r.tail].entity_id << '\n';
  }
  write_file(entity_file, ents.str());
  write_file(relation_file, rels.str());
  write_file(hierarchy_file, hierarchy_.serialize());
}

std::optional<EntityIndex> KnowledgeBase::find_entity(std::string_view entity_id) const {
  auto it = id_index_.find(entity_id);
  if (it == id_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<EntityIndex> KnowledgeBase::lookup_alias(std::string_view surface) const {
  if (auto it = exact_alias_.find(surface); it != exact_alias_.end()) return it->second;
  if (auto it = folded_alias_.find(ascii_lower(surface)); it != folded_alias_.end()) return it->second;
  return {};
}

std::optional<EntityIndex> KnowledgeBase::link(std::string_view surface) const {
  auto hits = lookup_alias(surface);
  if (hits.empty()) return std::nullopt;
  EntityIndex best = hits.front();
  for (EntityIndex e : hits) {
    if (fact_count_[e] > fact_count_[best]) best = e;
  }
  return best;
}

const std::vector<TypeId>& KnowledgeBase::relations_between(EntityIndex head, EntityIndex tail) const {
  static const std::vector<TypeId> kEmpty;
  if (head >= entities_.size() || tail >= entities_.size()) throw InputError("relations_between: entity index out of range");
  auto it = facts_.find({head, tail});
  return it == facts_.end() ? kEmpty : it->second;
}

std::vector<TypeId> KnowledgeBase::relations_between(std::string_view head_id, std::string_view tail_id) const {
  auto head = find_entity(head_id);
  if (!head) throw InputError("unknown entity " + std::string(head_id));
  auto tail = find_entity(tail_id);
  if (!tail) throw InputError("unknown entity " + std::string(tail_id));
  return relations_between(*head, *tail);
}

}  // namespace cotype
