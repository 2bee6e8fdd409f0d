// Copyright 2026 The kbqa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KBQA_KB_STORE_H_
#define KBQA_KB_STORE_H_

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kbqa {

class BinaryReader;
class BinaryWriter;

// Strips "www.freebase.com/" and "http(s)://host/" (plus a following "ns/")
// prefixes and angle brackets, turns '/' into '.', and lowercases.
// "www.freebase.com/m/02mjmr" -> "m.02mjmr". Throws MalformedId when the
// result is empty or contains whitespace.
std::string canonicalize_mid(std::string_view raw);

// Canonical Freebase machine id such as "m.02mjmr".
class EntityId {
 public:
  EntityId() = default;

  // Canonicalizes `raw`.
  static EntityId parse(std::string_view raw) {
    return EntityId(canonicalize_mid(raw), Canonical{});
  }

  const std::string &str() const { return mid_; }
  bool empty() const { return mid_.empty(); }

  friend auto operator<=>(const EntityId &, const EntityId &) = default;
  friend bool operator==(const EntityId &, const EntityId &) = default;

 private:
  struct Canonical {};
  EntityId(std::string mid, Canonical) : mid_(std::move(mid)) {}

  std::string mid_;
};

struct Fact {
  EntityId subject;
  std::string relation;  // "/people/person/place_of_birth"
  EntityId object;

  friend bool operator==(const Fact &, const Fact &) = default;
};

// Validates the relation spelling and builds a fact from raw ids.
Fact make_fact(std::string_view subject, std::string_view relation,
               std::string_view object);

struct EntityRecord {
  EntityId id;
  std::vector<std::string> aliases;  // lowercased, first-seen order, unique
  std::optional<std::string> notable_type;
  std::size_t out_degree = 0;
};

using AliasPair = std::pair<EntityId, std::string>;
using TypePair = std::pair<EntityId, std::string>;

// Immutable triple store. Every subject and object has a record; out-degree
// counts the stored facts whose subject is the entity.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  const std::vector<Fact> &facts() const { return facts_; }
  const std::map<EntityId, EntityRecord> &entities() const { return entities_; }
  std::size_t num_facts() const { return facts_.size(); }

  const EntityRecord *find(const EntityId &id) const;

  // Indices into facts() with subject `id`, in ingestion order.
  std::span<const std::size_t> facts_of(const EntityId &id) const;

  // Distinct relations with subject `id`, sorted.
  std::vector<std::string> relations_of(const EntityId &id) const;
  bool has_relation(const EntityId &id, std::string_view relation) const;
  std::vector<EntityId> lookup_objects(const EntityId &id,
                                       std::string_view relation) const;
  std::size_t out_degree(const EntityId &id) const;

  // First alias in ingestion order; the mid itself when none exists.
  std::string primary_alias(const EntityId &id) const;
  std::optional<std::string> notable_type(const EntityId &id) const;

  // Sorted distinct relations across all facts.
  std::vector<std::string> all_relations() const;

  void write(BinaryWriter &out) const;
  static KnowledgeBase read(BinaryReader &in);

 private:
  friend KnowledgeBase build_kb(std::vector<Fact>, const std::vector<AliasPair> &,
                                const std::vector<TypePair> &);
  void index_facts();

  std::vector<Fact> facts_;
  std::map<EntityId, EntityRecord> entities_;
  std::map<EntityId, std::vector<std::size_t>> by_subject_;
};

// Last write wins on repeated type pairs (logged). Aliases are lowercased and
// deduplicated. Entities mentioned only in alias/type pairs get records too.
KnowledgeBase build_kb(std::vector<Fact> facts,
                       const std::vector<AliasPair> &alias_pairs,
                       const std::vector<TypePair> &type_pairs);

}  // namespace kbqa

template <>
struct std::hash<kbqa::EntityId> {
  std::size_t operator()(const kbqa::EntityId &id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};

#endif  // KBQA_KB_STORE_H_
