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

#include "kbqa/triples.h"

#include <map>
#include <sstream>

#include "kbqa/errors.h"
#include "kbqa/logging.h"
#include "kbqa/text.h"

namespace kbqa {

namespace {

bool IsBlank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

void StripCr(std::string &line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (true) {
    const std::size_t j = line.find('\t', i);
    if (j == std::string_view::npos) {
      out.push_back(line.substr(i));
      return out;
    }
    out.push_back(line.substr(i, j - i));
    i = j + 1;
  }
}

std::vector<std::string_view> SplitSpaces(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

class LineCursor {
 public:
  explicit LineCursor(std::string_view s) : s_(s) {}

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  std::string iri() {
    if (done() || s_[pos_] != '<') throw ParseError(0, "expected '<'");
    const std::size_t close = s_.find('>', pos_ + 1);
    if (close == std::string_view::npos) throw ParseError(0, "unterminated IRI");
    std::string value(s_.substr(pos_ + 1, close - pos_ - 1));
    if (value.find_first_of(" \t<") != std::string::npos) {
      throw ParseError(0, "unterminated IRI");
    }
    pos_ = close + 1;
    return value;
  }

  RdfTerm literal() {
    RdfTerm term;
    term.kind = RdfTerm::Kind::kLiteral;
    ++pos_;  // opening quote
    bool closed = false;
    while (pos_ < s_.size()) {
      const char c = s_[pos_++];
      if (c == '"') {
        closed = true;
        break;
      }
      if (c != '\\') {
        term.value += c;
        continue;
      }
      if (pos_ >= s_.size()) break;
      const char e = s_[pos_++];
      switch (e) {
        case '"': term.value += '"'; break;
        case '\\': term.value += '\\'; break;
        case 'n': term.value += '\n'; break;
        case 't': term.value += '\t'; break;
        case 'r': term.value += '\r'; break;
        default: throw ParseError(0, std::string("unknown escape \\") + e);
      }
    }
    if (!closed) throw ParseError(0, "unterminated literal");
    if (pos_ < s_.size() && s_[pos_] == '@') {
      const std::size_t start = ++pos_;
      while (pos_ < s_.size() && s_[pos_] != ' ' && s_[pos_] != '\t' && s_[pos_] != '.') {
        ++pos_;
      }
      term.lang = std::string(s_.substr(start, pos_ - start));
      if (term.lang.empty()) throw ParseError(0, "empty language tag");
    } else if (s_.substr(pos_, 2) == "^^") {
      pos_ += 2;
      term.datatype = iri();
    }
    return term;
  }

  std::string_view rest() const { return s_.substr(pos_); }
  void advance() { ++pos_; }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string EscapeLiteral(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<Fact> parse_triples_tsv(std::istream &in, const std::string &source) {
  std::vector<Fact> facts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    StripCr(line);
    if (IsBlank(line)) continue;
    const auto fields = SplitTabs(line);
    if (fields.size() < 3) {
      throw ParseError(source, line_no, "expected subject<TAB>relation<TAB>object");
    }
    const auto objects = SplitSpaces(fields[2]);
    if (objects.empty()) throw ParseError(source, line_no, "empty object field");
    try {
      for (std::string_view obj : objects) {
        facts.push_back(make_fact(fields[0], fields[1], obj));
      }
    } catch (const ParseError &) {
      throw;
    } catch (const DataError &e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  return facts;
}

std::string serialize_triples_tsv(const std::vector<Fact> &facts) {
  std::string out;
  for (const Fact &f : facts) {
    out += f.subject.str();
    out += '\t';
    out += f.relation;
    out += '\t';
    out += f.object.str();
    out += '\n';
  }
  return out;
}

std::vector<AliasPair> parse_alias_tsv(std::istream &in, const std::string &source) {
  std::vector<AliasPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    StripCr(line);
    if (IsBlank(line)) continue;
    const auto fields = SplitTabs(line);
    if (fields.size() < 2) throw ParseError(source, line_no, "expected mid<TAB>alias");
    try {
      pairs.emplace_back(EntityId::parse(fields[0]), std::string(fields[1]));
    } catch (const DataError &e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  return pairs;
}

std::optional<RdfTriple> parse_ntriples_line(std::string_view line) {
  LineCursor cur(line);
  cur.skip_ws();
  if (cur.done() || cur.peek() == '#' || IsBlank(cur.rest())) return std::nullopt;

  RdfTriple t;
  t.subject = cur.iri();
  cur.skip_ws();
  t.predicate = cur.iri();
  cur.skip_ws();
  if (cur.done()) throw ParseError(0, "missing object");
  if (cur.peek() == '<') {
    t.object.value = cur.iri();
  } else if (cur.peek() == '"') {
    t.object = cur.literal();
  } else {
    throw ParseError(0, "object must be an IRI or a literal");
  }
  cur.skip_ws();
  if (cur.done() || cur.peek() != '.') throw ParseError(0, "missing terminal '.'");
  cur.advance();
  cur.skip_ws();
  if (!cur.done() && cur.peek() != '#') throw ParseError(0, "trailing garbage after '.'");
  return t;
}

std::string serialize_ntriples_line(const RdfTriple &t) {
  std::string out = "<" + t.subject + "> <" + t.predicate + "> ";
  if (t.object.is_literal()) {
    out += '"';
    out += EscapeLiteral(t.object.value);
    out += '"';
    if (!t.object.lang.empty()) {
      out += '@';
      out += t.object.lang;
    } else if (!t.object.datatype.empty()) {
      out += "^^<" + t.object.datatype + ">";
    }
  } else {
    out += "<" + t.object.value + ">";
  }
  out += " .";
  return out;
}

std::vector<RdfTriple> parse_ntriples(std::istream &in, const std::string &source) {
  std::vector<RdfTriple> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    StripCr(line);
    try {
      if (auto t = parse_ntriples_line(line)) out.push_back(std::move(*t));
    } catch (const ParseError &e) {
      std::string msg = e.what();
      const std::size_t colon = msg.find(": ");
      if (colon != std::string::npos) msg = msg.substr(colon + 2);
      throw ParseError(source, line_no, msg);
    }
  }
  return out;
}

std::vector<TypePair> join_notable_types(const std::vector<RdfTriple> &triples) {
  std::vector<std::pair<std::string, std::string>> assignments;  // entity iri, type iri
  std::map<std::string, std::pair<int, std::string>> names;      // type iri -> (rank, name)
  for (const RdfTriple &t : triples) {
    if (EndsWith(t.predicate, "notable_types") && !t.object.is_literal()) {
      assignments.emplace_back(t.subject, t.object.value);
    } else if (t.object.is_literal() &&
               (EndsWith(t.predicate, "type.object.name") || EndsWith(t.predicate, "label"))) {
      const int rank = t.object.lang == "en" ? 0 : (t.object.lang.empty() ? 1 : 2);
      auto it = names.find(t.subject);
      if (it == names.end() || rank < it->second.first) {
        names[t.subject] = {rank, t.object.value};
      }
    }
  }
  std::vector<TypePair> pairs;
  for (const auto &[entity, type] : assignments) {
    auto it = names.find(type);
    if (it == names.end()) {
      KBQA_LOG(Info) << "no name for notable type " << type << ", skipped";
      continue;
    }
    pairs.emplace_back(EntityId::parse(entity), to_lower(it->second.second));
  }
  return pairs;
}

std::vector<TypePair> parse_types_file(std::istream &in, const std::string &source) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  std::istringstream body(text);
  if (first != std::string::npos && text[first] == '<') {
    return join_notable_types(parse_ntriples(body, source));
  }
  std::vector<TypePair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(body, line)) {
    ++line_no;
    StripCr(line);
    if (IsBlank(line)) continue;
    const auto fields = SplitTabs(line);
    if (fields.size() < 2) throw ParseError(source, line_no, "expected mid<TAB>label");
    try {
      pairs.emplace_back(EntityId::parse(fields[0]), std::string(fields[1]));
    } catch (const DataError &e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  return pairs;
}

}  // namespace kbqa
