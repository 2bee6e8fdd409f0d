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

#ifndef KBQA_EVAL_H_
#define KBQA_EVAL_H_

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kbqa/datagen.h"
#include "kbqa/kb_store.h"

namespace kbqa {

// Every evaluated question lands in exactly one class.
//   same_label_entity  predicted id differs, primary labels equal
//   indistinguishable  as above, and the two share notable type and out-degree
//   ambiguity          labels differ but the entities share some alias
//   wrong_subject      any other wrong entity
//   wrong_predicate    right entity, wrong relation
//   no_candidates      nothing predicted
enum class Outcome {
  kCorrect,
  kSameLabelEntity,
  kIndistinguishable,
  kAmbiguity,
  kWrongSubject,
  kWrongPredicate,
  kNoCandidates,
};

std::string outcome_name(Outcome o);
// The six error class names, in report order.
const std::vector<std::string> &error_class_names();

struct PredictedPair {
  EntityId entity;
  std::string relation;
};

Outcome classify(const QuestionInstance &q, const std::optional<PredictedPair> &predicted,
                 const KnowledgeBase &kb);

struct EvalReport {
  std::string approach;
  std::size_t n = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  std::map<std::string, std::size_t> error_counts;  // all six classes present
  double wall_time_s = 0.0;

  // same_label_entity + indistinguishable, over n.
  double same_label_error_rate() const;
  std::size_t errors() const;
};

// Returns nullopt (or throws NoCandidates / NoRelation) when it has no answer.
using Predictor = std::function<std::optional<PredictedPair>(const QuestionInstance &)>;

// Throws EmptyEvalSet. `jobs` > 1 splits the questions over threads; the
// report does not depend on it.
EvalReport evaluate(const std::string &approach, std::span<const QuestionInstance> questions,
                    const KnowledgeBase &kb, const Predictor &predict, std::size_t jobs = 1,
                    std::vector<Outcome> *outcomes = nullptr);

// wall_time_s is written only when `with_time` is set, so that reports are
// byte-identical across runs.
std::string report_json(std::span<const EvalReport> reports, bool with_time = false);
std::vector<EvalReport> parse_report_json(const std::string &text);
// Approach | same-label error | Accuracy, one decimal percentages.
std::string report_table(std::span<const EvalReport> reports);
void report_write(std::span<const EvalReport> reports, const std::string &json_path,
                  const std::string &text_path, bool with_time = false);

}  // namespace kbqa

#endif  // KBQA_EVAL_H_
