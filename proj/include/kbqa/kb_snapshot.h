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

#ifndef KBQA_KB_SNAPSHOT_H_
#define KBQA_KB_SNAPSHOT_H_

#include <string>

#include "kbqa/alias_index.h"
#include "kbqa/kb_store.h"

namespace kbqa {

struct KbBundle {
  KnowledgeBase kb;
  AliasIndex index;
};

// Binary layout: "KBQA1", u32 version, KB section, alias-index section.
void save_kb_snapshot(const std::string &path, const KbBundle &bundle);
KbBundle load_kb_snapshot(const std::string &path);

// Reads facts TSV, alias TSV and (optional) types file, then builds the KB
// and its index.
KbBundle ingest_files(const std::string &facts_path, const std::string &aliases_path,
                      const std::string &types_path);

}  // namespace kbqa

#endif  // KBQA_KB_SNAPSHOT_H_
