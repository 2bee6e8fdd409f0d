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

#include "kbqa/kb_snapshot.h"

#include <fstream>

#include "kbqa/binary_io.h"
#include "kbqa/errors.h"
#include "kbqa/logging.h"
#include "kbqa/triples.h"

namespace kbqa {

namespace {

constexpr char kMagic[] = "KBQA1";
constexpr std::uint32_t kVersion = 1;

std::ifstream OpenInput(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

}  // namespace

void save_kb_snapshot(const std::string &path, const KbBundle &bundle) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  BinaryWriter w(out);
  w.magic(kMagic);
  w.u32(kVersion);
  bundle.kb.write(w);
  bundle.index.write(w);
  if (!out) throw DataError("write failed: " + path);
}

KbBundle load_kb_snapshot(const std::string &path) {
  std::ifstream in = OpenInput(path);
  BinaryReader r(in);
  r.expect_magic(kMagic);
  const std::uint32_t version = r.u32();
  if (version != kVersion) {
    throw SnapshotError("unsupported KB snapshot version " + std::to_string(version));
  }
  KbBundle bundle;
  bundle.kb = KnowledgeBase::read(r);
  bundle.index = AliasIndex::read(r);
  return bundle;
}

KbBundle ingest_files(const std::string &facts_path, const std::string &aliases_path,
                      const std::string &types_path) {
  std::ifstream facts_in = OpenInput(facts_path);
  auto facts = parse_triples_tsv(facts_in, facts_path);
  std::vector<AliasPair> aliases;
  if (!aliases_path.empty()) {
    std::ifstream in = OpenInput(aliases_path);
    aliases = parse_alias_tsv(in, aliases_path);
  }
  std::vector<TypePair> types;
  if (!types_path.empty()) {
    std::ifstream in = OpenInput(types_path);
    types = parse_types_file(in, types_path);
  }
  KBQA_LOG(Info) << "ingested " << facts.size() << " facts, " << aliases.size()
                 << " aliases, " << types.size() << " types";
  KbBundle bundle;
  bundle.kb = build_kb(std::move(facts), aliases, types);
  bundle.index = AliasIndex::build(bundle.kb);
  return bundle;
}

}  // namespace kbqa
