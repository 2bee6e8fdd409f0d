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

#include "train_util.h"

#include <fstream>

#include "kbqa/errors.h"
#include "kbqa/logging.h"

namespace kbqa::internal {

void load_vectors_if_any(const TrainConfig &cfg, nn::EmbeddingTable &table) {
  if (cfg.word_vectors.empty()) return;
  std::ifstream in(cfg.word_vectors);
  if (!in) throw DataError("cannot open word vectors " + cfg.word_vectors);
  const std::size_t n = nn::load_word_vectors(in, table);
  KBQA_LOG(Info) << "loaded " << n << " word vectors from " << cfg.word_vectors;
}

void append_params(nn::ParamStore &into, const std::string &prefix, const nn::ParamStore &from) {
  for (std::size_t k = 0; k < from.count(); ++k) {
    into.add(prefix + from.names()[k], from.vars()[k]->value);
  }
}

nn::ModelSnapshot sub_snapshot(const nn::ModelSnapshot &snap, const std::string &prefix) {
  nn::ModelSnapshot out;
  out.metadata = snap.metadata;
  for (const auto &[name, t] : snap.params) {
    if (name.compare(0, prefix.size(), prefix) == 0) out.params.emplace(name.substr(prefix.size()), t);
  }
  return out;
}

}  // namespace kbqa::internal
