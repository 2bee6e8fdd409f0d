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

#include "kbqa/errors.h"

namespace kbqa {

namespace {

std::string FormatLocation(const std::string &source, std::size_t line_no,
                           const std::string &what) {
  std::string out = source.empty() ? std::string("line ") : source + ":";
  out += std::to_string(line_no);
  out += ": ";
  out += what;
  return out;
}

}  // namespace

ParseError::ParseError(const std::string &source, std::size_t line_no,
                       const std::string &what)
    : DataError(FormatLocation(source, line_no, what)),
      source_(source),
      line_no_(line_no) {}

}  // namespace kbqa
