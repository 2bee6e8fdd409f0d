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

#ifndef KBQA_SRC_TRAIN_UTIL_H_
#define KBQA_SRC_TRAIN_UTIL_H_

#include <set>
#include <string>

#include "json.hpp"
#include "kbqa/nn/layers.h"
#include "kbqa/nn/snapshot.h"
#include "kbqa/pipeline.h"

namespace kbqa::internal {

inline nn::Vocab make_vocab(const std::set<std::string> &tokens) {
  nn::Vocab v;
  for (const std::string &t : tokens) {
    if (t != nn::Vocab::kOovToken) v.add(t);
  }
  return v;
}

inline nlohmann::json vocab_json(const nn::Vocab &v) { return v.tokens(); }

inline nn::Vocab vocab_from_json(const nlohmann::json &j) {
  return nn::Vocab(j.get<std::vector<std::string>>());
}

inline nlohmann::json config_json(const TrainConfig &c) {
  return {{"embed_dim", c.embed_dim}, {"hidden", c.hidden}, {"epochs", c.epochs},
          {"lr", c.lr},               {"dropout", c.dropout}, {"clip_norm", c.clip_norm},
          {"seed", c.seed}};
}

inline TrainConfig config_from_json(const nlohmann::json &j) {
  TrainConfig c;
  c.embed_dim = j.at("embed_dim").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::size_t>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.lr = j.at("lr").get<double>();
  c.dropout = j.at("dropout").get<double>();
  c.clip_norm = j.at("clip_norm").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

// Loads cfg.word_vectors (if set) into `table`.
void load_vectors_if_any(const TrainConfig &cfg, nn::EmbeddingTable &table);

// Copies every parameter of `from` into `into` under `prefix`.
void append_params(nn::ParamStore &into, const std::string &prefix, const nn::ParamStore &from);

// Parameters whose names start with `prefix`, prefix removed.
nn::ModelSnapshot sub_snapshot(const nn::ModelSnapshot &snap, const std::string &prefix);

}  // namespace kbqa::internal

#endif  // KBQA_SRC_TRAIN_UTIL_H_
