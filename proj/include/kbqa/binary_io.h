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

#ifndef KBQA_BINARY_IO_H_
#define KBQA_BINARY_IO_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

namespace kbqa {

// Little-endian primitive encoding shared by the KB and model snapshots.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream &out) : out_(out) {}

  void magic(std::string_view tag) { out_.write(tag.data(), tag.size()); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void str(std::string_view s);

 private:
  std::ostream &out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream &in) : in_(in) {}

  // Throws SnapshotError when the next bytes do not equal `tag`.
  void expect_magic(std::string_view tag);
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::string str();

 private:
  void read(char *dst, std::size_t n);
  std::istream &in_;
};

}  // namespace kbqa

#endif  // KBQA_BINARY_IO_H_
