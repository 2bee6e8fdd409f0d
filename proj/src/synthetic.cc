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

#include "kbqa/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "kbqa/errors.h"
#include "kbqa/rng.h"
#include "kbqa/triples.h"

namespace kbqa {

namespace {

struct RelationTemplate {
  const char *relation;
  const char *question;  // "{}" marks the subject alias
};

struct SubjectClass {
  const char *type;
  const char *alt_type;  // decoy type when twins must differ
  std::vector<RelationTemplate> relations;
};

// Interleaved so that a prefix of n relations touches as many classes as
// possible.
const std::vector<SubjectClass> &Classes() {
  static const std::vector<SubjectClass> classes = {
      {"person", "politician",
       {{"/people/person/place_of_birth", "where was {} born"},
        {"/people/person/nationality", "which country is {} from"},
        {"/people/person/profession", "what does {} do for a living"}}},
      {"musical album", "musical recording",
       {{"/music/album/genre", "what genre is the album {}"},
        {"/music/album/artist", "who recorded the album {}"},
        {"/music/album/release_type", "what kind of release is {}"}}},
      {"film", "tv program",
       {{"/film/film/directed_by", "who directed the film {}"},
        {"/film/film/language", "what language is {} in"},
        {"/film/film/country", "which country produced {}"}}},
      {"book", "written work",
       {{"/book/written_work/author", "who wrote {}"},
        {"/book/written_work/subjects", "what is the book {} about"}}},
      {"city", "country",
       {{"/location/location/containedby", "where is {} located"},
        {"/location/location/time_zones", "what time zone is {} in"},
        {"/location/location/area", "how large is {}"}}},
  };
  return classes;
}

constexpr std::size_t kObjectsPerRelation = 6;

const char *const kSyllables[] = {"ba", "ko", "ri", "ta", "mu", "ne", "lo", "vi",
                                  "sa", "de", "fi", "go", "ha", "ju", "ka", "le",
                                  "mo", "nu", "pe", "ru", "si", "zo", "wa", "ze"};

std::string Fill(const char *tmpl, const std::string &alias) {
  std::string s(tmpl);
  s.replace(s.find("{}"), 2, alias);
  return s;
}

std::string Mid(char kind, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "m.0%c%04zu", kind, n);
  return buf;
}

class NameSource {
 public:
  explicit NameSource(Rng &rng) : rng_(rng) {}

  std::string word() {
    const std::size_t n = 2 + rng_.index(2);
    std::string w;
    for (std::size_t i = 0; i < n; ++i) w += kSyllables[rng_.index(std::size(kSyllables))];
    return w;
  }

  // Unique one- or two-word name.
  std::string name(bool allow_two_words) {
    while (true) {
      std::string s = word();
      if (allow_two_words && rng_.bernoulli(0.5)) s += " " + word();
      if (used_.insert(s).second) return s;
    }
  }

 private:
  Rng &rng_;
  std::set<std::string> used_;
};

}  // namespace

KnowledgeBase SyntheticData::build_kb() const { return kbqa::build_kb(facts, aliases, types); }

SyntheticData generate_synthetic(const SyntheticSpec &spec) {
  if (spec.n_entities == 0) throw DataError("synthetic spec needs at least one entity");
  Rng rng(spec.seed);
  NameSource names(rng);

  // Relation templates in use, by class.
  std::vector<std::vector<RelationTemplate>> active(Classes().size());
  {
    std::size_t taken = 0, depth = 0;
    const std::size_t limit = std::max<std::size_t>(1, spec.n_relations);
    while (taken < limit) {
      bool any = false;
      for (std::size_t c = 0; c < Classes().size() && taken < limit; ++c) {
        if (depth < Classes()[c].relations.size()) {
          active[c].push_back(Classes()[c].relations[depth]);
          ++taken;
          any = true;
        }
      }
      if (!any) break;
      ++depth;
    }
  }
  std::vector<std::size_t> live_classes;
  for (std::size_t c = 0; c < active.size(); ++c) {
    if (!active[c].empty()) live_classes.push_back(c);
  }

  SyntheticData data;
  // Object entities, a small pool per relation.
  std::map<std::string, std::vector<EntityId>> objects;
  std::size_t object_count = 0;
  for (std::size_t c : live_classes) {
    for (const RelationTemplate &t : active[c]) {
      for (std::size_t k = 0; k < kObjectsPerRelation; ++k) {
        const EntityId id = EntityId::parse(Mid('o', object_count++));
        objects[t.relation].push_back(id);
        data.aliases.emplace_back(id, names.name(false));
        data.types.emplace_back(id, "topic");
      }
    }
  }
  auto pick_object = [&](const std::string &relation) {
    const auto &pool = objects.at(relation);
    return pool[rng.index(pool.size())];
  };

  struct Subject {
    EntityId id;
    std::size_t cls;
    std::string alias;
  };
  std::vector<Subject> subjects;
  std::vector<QuestionInstance> questions;
  for (std::size_t i = 0; i < spec.n_entities; ++i) {
    Subject s{EntityId::parse(Mid('s', i)), live_classes[i % live_classes.size()],
              names.name(true)};
    data.aliases.emplace_back(s.id, s.alias);
    data.types.emplace_back(s.id, Classes()[s.cls].type);
    for (const RelationTemplate &t : active[s.cls]) {
      Fact f{s.id, t.relation, pick_object(t.relation)};
      data.facts.push_back(f);
      questions.push_back(QuestionInstance::make(Fill(t.question, s.alias), f));
    }
    subjects.push_back(std::move(s));
  }

  // Twins: a decoy with the same alias holding one of the gold subject's
  // relations. The decoy id ("m.0d...") sorts before the gold one ("m.0s...").
  std::size_t n_twins = static_cast<std::size_t>(
      std::llround(spec.collision_rate * static_cast<double>(spec.n_entities)));
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    if (!spec.twin_outdegree_gap || active[subjects[i].cls].size() >= 2) eligible.push_back(i);
  }
  n_twins = std::min(n_twins, eligible.size());
  rng.shuffle(eligible);
  eligible.resize(n_twins);
  std::sort(eligible.begin(), eligible.end());
  for (std::size_t i : eligible) {
    const Subject &gold = subjects[i];
    const auto &rels = active[gold.cls];
    const EntityId decoy = EntityId::parse(Mid('d', i));
    data.aliases.emplace_back(decoy, gold.alias);
    const SubjectClass &cls = Classes()[gold.cls];
    data.types.emplace_back(decoy, spec.twin_type_distinct ? cls.alt_type : cls.type);
    if (spec.twin_outdegree_gap) {
      const RelationTemplate &t = rels[rng.index(rels.size())];
      data.facts.push_back({decoy, t.relation, pick_object(t.relation)});
    } else {
      for (const RelationTemplate &t : rels) {
        data.facts.push_back({decoy, t.relation, pick_object(t.relation)});
      }
    }
    data.twins.emplace_back(gold.id, decoy);
  }

  rng.shuffle(questions);
  const std::size_t n_train = static_cast<std::size_t>(
      std::llround(spec.train_fraction * static_cast<double>(questions.size())));
  data.train.assign(questions.begin(), questions.begin() + n_train);
  data.test.assign(questions.begin() + n_train, questions.end());
  return data;
}

void write_synthetic(const SyntheticData &data, const std::string &dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string &name, const std::string &content) {
    std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
    if (!out) throw DataError("cannot write " + dir + "/" + name);
    out << content;
  };
  auto pairs = [](const std::vector<std::pair<EntityId, std::string>> &v) {
    std::string s;
    for (const auto &[id, text] : v) s += id.str() + "\t" + text + "\n";
    return s;
  };
  write("facts.tsv", serialize_triples_tsv(data.facts));
  write("aliases.tsv", pairs(data.aliases));
  write("types.tsv", pairs(data.types));
  write("train.tsv", serialize_questions_tsv(data.train));
  write("test.tsv", serialize_questions_tsv(data.test));
}

}  // namespace kbqa
