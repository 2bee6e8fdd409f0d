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

#include "kbqa/kb_store.h"

#include <algorithm>
#include <cctype>
#include <set>

#include "kbqa/binary_io.h"
#include "kbqa/errors.h"
#include "kbqa/logging.h"
#include "kbqa/text.h"

namespace kbqa {

namespace {

bool StartsWith(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

bool StartsWithNoCase(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && to_lower(s.substr(0, prefix.size())) == prefix;
}

}  // namespace

std::string canonicalize_mid(std::string_view raw) {
  std::string_view s = raw;
  // Peel wrappers until nothing changes so that the result is a fixpoint.
  for (std::size_t before = s.size() + 1; before != s.size();) {
    before = s.size();
    if (s.size() >= 2 && s.front() == '<' && s.back() == '>') {
      s = s.substr(1, s.size() - 2);
    }
    if (StartsWithNoCase(s, "http://") || StartsWithNoCase(s, "https://")) {
      s = s.substr(s.find("//") + 2);
      const std::size_t slash = s.find('/');
      s = slash == std::string_view::npos ? std::string_view() : s.substr(slash + 1);
      if (StartsWith(s, "ns/")) s = s.substr(3);
    } else if (StartsWithNoCase(s, "www.freebase.com/")) {
      s = s.substr(17);
    } else if (StartsWithNoCase(s, "rdf.freebase.com/ns/")) {
      s = s.substr(20);
    }
    while (!s.empty() && s.front() == '/') s.remove_prefix(1);
  }

  std::string out = to_lower(s);
  std::replace(out.begin(), out.end(), '/', '.');
  if (out.empty()) {
    throw MalformedId("empty entity id from '" + std::string(raw) + "'");
  }
  for (char c : out) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      throw MalformedId("whitespace in entity id '" + std::string(raw) + "'");
    }
  }
  return out;
}

Fact make_fact(std::string_view subject, std::string_view relation,
               std::string_view object) {
  if (relation.empty() || relation.front() != '/') {
    throw DataError("relation must start with '/': '" + std::string(relation) + "'");
  }
  return Fact{EntityId::parse(subject), std::string(relation), EntityId::parse(object)};
}

const EntityRecord *KnowledgeBase::find(const EntityId &id) const {
  auto it = entities_.find(id);
  return it == entities_.end() ? nullptr : &it->second;
}

std::span<const std::size_t> KnowledgeBase::facts_of(const EntityId &id) const {
  auto it = by_subject_.find(id);
  if (it == by_subject_.end()) return {};
  return it->second;
}

std::vector<std::string> KnowledgeBase::relations_of(const EntityId &id) const {
  std::vector<std::string> out;
  for (std::size_t i : facts_of(id)) out.push_back(facts_[i].relation);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool KnowledgeBase::has_relation(const EntityId &id, std::string_view relation) const {
  for (std::size_t i : facts_of(id)) {
    if (facts_[i].relation == relation) return true;
  }
  return false;
}

std::vector<EntityId> KnowledgeBase::lookup_objects(const EntityId &id,
                                                    std::string_view relation) const {
  std::vector<EntityId> out;
  for (std::size_t i : facts_of(id)) {
    if (facts_[i].relation == relation) out.push_back(facts_[i].object);
  }
  return out;
}

std::size_t KnowledgeBase::out_degree(const EntityId &id) const {
  const EntityRecord *rec = find(id);
  return rec == nullptr ? 0 : rec->out_degree;
}

std::string KnowledgeBase::primary_alias(const EntityId &id) const {
  const EntityRecord *rec = find(id);
  if (rec == nullptr || rec->aliases.empty()) return id.str();
  return rec->aliases.front();
}

std::optional<std::string> KnowledgeBase::notable_type(const EntityId &id) const {
  const EntityRecord *rec = find(id);
  return rec == nullptr ? std::nullopt : rec->notable_type;
}

std::vector<std::string> KnowledgeBase::all_relations() const {
  std::set<std::string> rels;
  for (const Fact &f : facts_) rels.insert(f.relation);
  return {rels.begin(), rels.end()};
}

void KnowledgeBase::index_facts() {
  by_subject_.clear();
  for (auto &[id, rec] : entities_) rec.out_degree = 0;
  for (std::size_t i = 0; i < facts_.size(); ++i) {
    const Fact &f = facts_[i];
    by_subject_[f.subject].push_back(i);
    auto &subj = entities_[f.subject];
    subj.id = f.subject;
    ++subj.out_degree;
    auto &obj = entities_[f.object];
    obj.id = f.object;
  }
}

KnowledgeBase build_kb(std::vector<Fact> facts,
                       const std::vector<AliasPair> &alias_pairs,
                       const std::vector<TypePair> &type_pairs) {
  KnowledgeBase kb;
  kb.facts_ = std::move(facts);
  kb.index_facts();

  for (const auto &[id, alias] : alias_pairs) {
    std::string lowered = to_lower(alias);
    if (lowered.empty()) continue;
    auto &rec = kb.entities_[id];
    rec.id = id;
    if (std::find(rec.aliases.begin(), rec.aliases.end(), lowered) == rec.aliases.end()) {
      rec.aliases.push_back(std::move(lowered));
    }
  }
  for (const auto &[id, label] : type_pairs) {
    auto &rec = kb.entities_[id];
    rec.id = id;
    if (rec.notable_type && *rec.notable_type != label) {
      KBQA_LOG(Warning) << "notable type of " << id.str() << " replaced: '"
                        << *rec.notable_type << "' -> '" << label << "'";
    }
    rec.notable_type = label;
  }
  return kb;
}

void KnowledgeBase::write(BinaryWriter &out) const {
  out.u64(facts_.size());
  for (const Fact &f : facts_) {
    out.str(f.subject.str());
    out.str(f.relation);
    out.str(f.object.str());
  }
  out.u64(entities_.size());
  for (const auto &[id, rec] : entities_) {
    out.str(id.str());
    out.u64(rec.aliases.size());
    for (const auto &a : rec.aliases) out.str(a);
    out.u32(rec.notable_type ? 1 : 0);
    out.str(rec.notable_type.value_or(""));
    out.u64(rec.out_degree);
  }
}

KnowledgeBase KnowledgeBase::read(BinaryReader &in) {
  KnowledgeBase kb;
  const std::uint64_t nf = in.u64();
  kb.facts_.reserve(nf);
  for (std::uint64_t i = 0; i < nf; ++i) {
    std::string s = in.str(), r = in.str(), o = in.str();
    kb.facts_.push_back(make_fact(s, r, o));
  }
  const std::uint64_t ne = in.u64();
  std::vector<std::size_t> stored_degree;
  for (std::uint64_t i = 0; i < ne; ++i) {
    EntityRecord rec;
    rec.id = EntityId::parse(in.str());
    const std::uint64_t na = in.u64();
    for (std::uint64_t a = 0; a < na; ++a) rec.aliases.push_back(in.str());
    const bool has_type = in.u32() != 0;
    std::string type = in.str();
    if (has_type) rec.notable_type = std::move(type);
    rec.out_degree = in.u64();
    kb.entities_[rec.id] = std::move(rec);
  }
  std::map<EntityId, std::size_t> expected;
  for (const auto &[id, rec] : kb.entities_) expected[id] = rec.out_degree;
  kb.index_facts();
  for (const auto &[id, rec] : kb.entities_) {
    if (expected[id] != rec.out_degree) {
      throw SnapshotError("snapshot out-degree mismatch for " + id.str());
    }
  }
  return kb;
}

}  // namespace kbqa
