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

#ifndef KBQA_TRIPLES_H_
#define KBQA_TRIPLES_H_

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kbqa/kb_store.h"

namespace kbqa {

// Facts TSV: subject<TAB>relation<TAB>object [object ...]. Each object in a
// space-separated object list yields its own fact. Blank lines are skipped.
// Throws ParseError(line) on fewer than three fields.
std::vector<Fact> parse_triples_tsv(std::istream &in, const std::string &source = "");
std::string serialize_triples_tsv(const std::vector<Fact> &facts);

// mid<TAB>alias per line.
std::vector<AliasPair> parse_alias_tsv(std::istream &in, const std::string &source = "");

struct RdfTerm {
  enum class Kind { kIri, kLiteral };
  Kind kind = Kind::kIri;
  std::string value;     // IRI without brackets, or the unescaped literal
  std::string lang;      // literal language tag, without '@'
  std::string datatype;  // literal datatype IRI, without brackets

  bool is_literal() const { return kind == Kind::kLiteral; }
  friend bool operator==(const RdfTerm &, const RdfTerm &) = default;
};

struct RdfTriple {
  std::string subject;
  std::string predicate;
  RdfTerm object;

  friend bool operator==(const RdfTriple &, const RdfTriple &) = default;
};

// Simplified N-Triples: `<iri> <iri> (<iri> | "literal"[@lang|^^<iri>]) .`
// Comments and blank lines return nullopt. Literal escapes \" \\ \n \t \r
// are decoded. Throws ParseError (line 0) on malformed input; the stream
// reader below fills in the line number.
std::optional<RdfTriple> parse_ntriples_line(std::string_view line);
std::string serialize_ntriples_line(const RdfTriple &triple);

std::vector<RdfTriple> parse_ntriples(std::istream &in, const std::string &source = "");

// Joins type assignments (predicate ending in "notable_types", IRI object)
// with type names (predicate ending in "type.object.name" or "label", literal
// object; English or untagged preferred) into (entity, label) pairs.
std::vector<TypePair> join_notable_types(const std::vector<RdfTriple> &triples);

// Types file: `mid<TAB>label` TSV, or N-Triples when the first non-blank
// character is '<'.
std::vector<TypePair> parse_types_file(std::istream &in, const std::string &source = "");

}  // namespace kbqa

#endif  // KBQA_TRIPLES_H_
