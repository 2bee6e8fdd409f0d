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

#include "kbqa/nn/snapshot.h"

#include <fstream>

#include "kbqa/binary_io.h"
#include "kbqa/errors.h"

namespace kbqa::nn {

namespace {

constexpr char kMagic[] = "NNQA1";
constexpr std::uint32_t kVersion = 1;

}  // namespace

void save_model_snapshot(const std::string &path, const std::string &metadata,
                         const ParamStore &store) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  BinaryWriter w(out);
  w.magic(kMagic);
  w.u32(kVersion);
  w.str(metadata);
  w.u64(store.count());
  for (std::size_t k = 0; k < store.count(); ++k) {
    const Tensor &t = store.vars()[k]->value;
    w.str(store.names()[k]);
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) w.u64(d);
    for (double x : t.data()) w.f64(x);
  }
  if (!out) throw DataError("write failed: " + path);
}

ModelSnapshot load_model_snapshot(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  BinaryReader r(in);
  r.expect_magic(kMagic);
  const std::uint32_t version = r.u32();
  if (version != kVersion) {
    throw SnapshotError("unsupported model snapshot version " + std::to_string(version));
  }
  ModelSnapshot snap;
  snap.metadata = r.str();
  const std::uint64_t count = r.u64();
  for (std::uint64_t k = 0; k < count; ++k) {
    std::string name = r.str();
    const std::uint32_t rank = r.u32();
    if (rank > 8) throw SnapshotError("implausible tensor rank in " + name);
    Shape shape(rank);
    for (auto &d : shape) d = r.u64();
    const std::size_t n = shape_size(shape);
    if (n > (1ULL << 34)) throw SnapshotError("implausible tensor size in " + name);
    std::vector<double> data(n);
    for (auto &x : data) x = r.f64();
    snap.params.emplace(std::move(name), Tensor(std::move(shape), std::move(data)));
  }
  return snap;
}

void restore_params(const ModelSnapshot &snapshot, const ParamStore &store) {
  for (std::size_t k = 0; k < store.count(); ++k) {
    const std::string &name = store.names()[k];
    auto it = snapshot.params.find(name);
    if (it == snapshot.params.end()) throw SnapshotError("snapshot lacks parameter " + name);
    Tensor &dst = store.vars()[k]->value;
    if (it->second.shape() != dst.shape()) {
      throw SnapshotError("shape mismatch for " + name + ": " +
                          shape_string(it->second.shape()) + " vs " + shape_string(dst.shape()));
    }
    dst = it->second;
  }
}

}  // namespace kbqa::nn
