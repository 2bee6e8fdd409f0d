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

#include "kbqa/binary_io.h"

#include <bit>
#include <cstring>

#include "kbqa/errors.h"

namespace kbqa {

namespace {

// Upper bound on a single string field; anything larger is corruption.
constexpr std::uint64_t kMaxString = 1ULL << 31;

}  // namespace

void BinaryWriter::u32(std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out_.write(b, 4);
}

void BinaryWriter::u64(std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out_.write(b, 8);
}

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::str(std::string_view s) {
  u64(s.size());
  out_.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void BinaryReader::read(char *dst, std::size_t n) {
  in_.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in_.gcount()) != n) {
    throw SnapshotError("snapshot truncated");
  }
}

void BinaryReader::expect_magic(std::string_view tag) {
  std::string got(tag.size(), '\0');
  in_.read(got.data(), static_cast<std::streamsize>(tag.size()));
  if (static_cast<std::size_t>(in_.gcount()) != tag.size() || got != tag) {
    throw SnapshotError("bad snapshot header, expected " + std::string(tag));
  }
}

std::uint32_t BinaryReader::u32() {
  unsigned char b[4];
  read(reinterpret_cast<char *>(b), 4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t BinaryReader::u64() {
  unsigned char b[8];
  read(reinterpret_cast<char *>(b), 8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

std::string BinaryReader::str() {
  const std::uint64_t n = u64();
  if (n > kMaxString) throw SnapshotError("snapshot string too long");
  std::string s(n, '\0');
  if (n > 0) read(s.data(), n);
  return s;
}

}  // namespace kbqa
