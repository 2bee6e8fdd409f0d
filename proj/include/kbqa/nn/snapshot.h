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

#ifndef KBQA_NN_SNAPSHOT_H_
#define KBQA_NN_SNAPSHOT_H_

#include <map>
#include <string>

#include "kbqa/nn/layers.h"

namespace kbqa::nn {

// "NNQA1" model file: u32 version, metadata string (JSON), then a table of
// named parameters (name, rank, dims, little-endian float64 values).
struct ModelSnapshot {
  std::string metadata;
  std::map<std::string, Tensor> params;
};

void save_model_snapshot(const std::string &path, const std::string &metadata,
                         const ParamStore &store);
ModelSnapshot load_model_snapshot(const std::string &path);

// Copies stored values into `store`. Every parameter of `store` must be
// present with an identical shape.
void restore_params(const ModelSnapshot &snapshot, const ParamStore &store);

}  // namespace kbqa::nn

#endif  // KBQA_NN_SNAPSHOT_H_
