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

#include "kbqa/eval.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <thread>

#include "json.hpp"
#include "kbqa/errors.h"

namespace kbqa {

using nlohmann::ordered_json;

std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kCorrect: return "correct";
    case Outcome::kSameLabelEntity: return "same_label_entity";
    case Outcome::kIndistinguishable: return "indistinguishable";
    case Outcome::kAmbiguity: return "ambiguity";
    case Outcome::kWrongSubject: return "wrong_subject";
    case Outcome::kWrongPredicate: return "wrong_predicate";
    case Outcome::kNoCandidates: return "no_candidates";
  }
  return "?";
}

const std::vector<std::string> &error_class_names() {
  static const std::vector<std::string> names = {
      "same_label_entity", "indistinguishable", "ambiguity",
      "wrong_subject",     "wrong_predicate",   "no_candidates"};
  return names;
}

Outcome classify(const QuestionInstance &q, const std::optional<PredictedPair> &predicted,
                 const KnowledgeBase &kb) {
  if (!predicted) return Outcome::kNoCandidates;
  const EntityId &gold = q.gold.subject;
  const EntityId &got = predicted->entity;
  if (got == gold) {
    return predicted->relation == q.gold.relation ? Outcome::kCorrect : Outcome::kWrongPredicate;
  }
  if (kb.primary_alias(got) == kb.primary_alias(gold)) {
    if (kb.notable_type(got) == kb.notable_type(gold) &&
        kb.out_degree(got) == kb.out_degree(gold)) {
      return Outcome::kIndistinguishable;
    }
    return Outcome::kSameLabelEntity;
  }
  const EntityRecord *a = kb.find(got);
  const EntityRecord *b = kb.find(gold);
  if (a && b) {
    for (const std::string &alias : a->aliases) {
      if (std::find(b->aliases.begin(), b->aliases.end(), alias) != b->aliases.end()) {
        return Outcome::kAmbiguity;
      }
    }
  }
  return Outcome::kWrongSubject;
}

double EvalReport::same_label_error_rate() const {
  if (n == 0) return 0.0;
  return static_cast<double>(error_counts.at("same_label_entity") +
                             error_counts.at("indistinguishable")) /
         static_cast<double>(n);
}

std::size_t EvalReport::errors() const {
  std::size_t e = 0;
  for (const auto &[k, v] : error_counts) e += v;
  return e;
}

EvalReport evaluate(const std::string &approach, std::span<const QuestionInstance> questions,
                    const KnowledgeBase &kb, const Predictor &predict, std::size_t jobs,
                    std::vector<Outcome> *outcomes) {
  if (questions.empty()) throw EmptyEvalSet();
  const auto start = std::chrono::steady_clock::now();
  std::vector<Outcome> results(questions.size(), Outcome::kNoCandidates);
  auto run = [&](std::size_t i) {
    std::optional<PredictedPair> p;
    try {
      p = predict(questions[i]);
    } catch (const NoCandidates &) {
    } catch (const NoRelation &) {
    }
    results[i] = classify(questions[i], p, kb);
  };
  jobs = std::clamp<std::size_t>(jobs, 1, questions.size());
  if (jobs == 1) {
    for (std::size_t i = 0; i < questions.size(); ++i) run(i);
  } else {
    std::vector<std::exception_ptr> failures(jobs);
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) {
      pool.emplace_back([&, j] {
        try {
          for (std::size_t i = j; i < questions.size(); i += jobs) run(i);
        } catch (...) {
          failures[j] = std::current_exception();
        }
      });
    }
    for (auto &t : pool) t.join();
    for (auto &f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }

  EvalReport r;
  r.approach = approach;
  r.n = questions.size();
  for (const std::string &name : error_class_names()) r.error_counts[name] = 0;
  for (Outcome o : results) {
    if (o == Outcome::kCorrect) {
      ++r.correct;
    } else {
      ++r.error_counts[outcome_name(o)];
    }
  }
  r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.n);
  r.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (outcomes) *outcomes = std::move(results);
  return r;
}

std::string report_json(std::span<const EvalReport> reports, bool with_time) {
  ordered_json arr = ordered_json::array();
  for (const EvalReport &r : reports) {
    ordered_json j;
    j["approach"] = r.approach;
    j["n"] = r.n;
    j["correct"] = r.correct;
    j["accuracy"] = r.accuracy;
    j["same_label_error"] = r.same_label_error_rate();
    ordered_json counts;
    for (const std::string &name : error_class_names()) counts[name] = r.error_counts.at(name);
    j["error_counts"] = counts;
    if (with_time) j["wall_time_s"] = r.wall_time_s;
    arr.push_back(j);
  }
  return ordered_json{{"reports", arr}}.dump(2) + "\n";
}

std::vector<EvalReport> parse_report_json(const std::string &text) {
  std::vector<EvalReport> out;
  try {
    const ordered_json doc = ordered_json::parse(text);
    for (const auto &j : doc.at("reports")) {
      EvalReport r;
      r.approach = j.at("approach").get<std::string>();
      r.n = j.at("n").get<std::size_t>();
      r.correct = j.at("correct").get<std::size_t>();
      r.accuracy = j.at("accuracy").get<double>();
      for (const auto &[k, v] : j.at("error_counts").items()) r.error_counts[k] = v.get<std::size_t>();
      if (j.contains("wall_time_s")) r.wall_time_s = j["wall_time_s"].get<double>();
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception &e) {
    throw DataError(std::string("bad report: ") + e.what());
  }
  return out;
}

std::string report_table(std::span<const EvalReport> reports) {
  auto pct = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * x);
    return std::string(buf);
  };
  const std::string h1 = "Approach", h2 = "Same-label error", h3 = "Accuracy";
  std::size_t w1 = h1.size();
  for (const EvalReport &r : reports) w1 = std::max(w1, r.approach.size());
  auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(w, s.size()), ' ');
    return s;
  };
  std::string out = pad(h1, w1) + " | " + h2 + " | " + h3 + "\n";
  out += std::string(w1, '-') + "-+-" + std::string(h2.size(), '-') + "-+-" +
         std::string(h3.size(), '-') + "\n";
  for (const EvalReport &r : reports) {
    std::string s = pct(r.same_label_error_rate());
    std::string a = pct(r.accuracy);
    out += pad(r.approach, w1) + " | " + std::string(h2.size() - std::min(h2.size(), s.size()), ' ') +
           s + " | " + std::string(h3.size() - std::min(h3.size(), a.size()), ' ') + a + "\n";
  }
  return out;
}

void report_write(std::span<const EvalReport> reports, const std::string &json_path,
                  const std::string &text_path, bool with_time) {
  std::ofstream j(json_path, std::ios::binary);
  std::ofstream t(text_path, std::ios::binary);
  if (!j || !t) throw DataError("cannot write report to " + json_path + " / " + text_path);
  j << report_json(reports, with_time);
  t << report_table(reports);
}

}  // namespace kbqa
