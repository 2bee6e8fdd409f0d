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

#ifndef KBQA_SYNTHETIC_H_
#define KBQA_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kbqa/datagen.h"
#include "kbqa/kb_store.h"

namespace kbqa {

// Seeded micro-benchmark with optional same-label twins.
struct SyntheticSpec {
  std::uint64_t seed = 1;
  std::size_t n_entities = 60;   // subjects asked about
  std::size_t n_relations = 14;  // relation templates in use (max 14)
  double collision_rate = 0.0;   // round(rate * n_entities) subjects get a twin
  // Gold twin holds strictly more facts than its decoy.
  bool twin_outdegree_gap = false;
  // Decoy carries a different notable type.
  bool twin_type_distinct = false;
  double train_fraction = 0.7;
};

struct SyntheticData {
  std::vector<Fact> facts;
  std::vector<AliasPair> aliases;
  std::vector<TypePair> types;
  std::vector<QuestionInstance> train;
  std::vector<QuestionInstance> test;
  std::vector<std::pair<EntityId, EntityId>> twins;  // (gold, decoy)

  KnowledgeBase build_kb() const;
};

// Deterministic per spec. Every question contains its subject's alias
// verbatim. Decoy ids sort before their gold twin, so a ranking that only
// looks at labels picks the decoy.
SyntheticData generate_synthetic(const SyntheticSpec &spec);

// facts.tsv, aliases.tsv, types.tsv, train.tsv, test.tsv under `dir`.
void write_synthetic(const SyntheticData &data, const std::string &dir);

}  // namespace kbqa

#endif  // KBQA_SYNTHETIC_H_
