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

#include "commands.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "kbqa/datagen.h"
#include "kbqa/e2e.h"
#include "kbqa/errors.h"
#include "kbqa/eval.h"
#include "kbqa/kb_snapshot.h"
#include "kbqa/logging.h"
#include "kbqa/nn/snapshot.h"
#include "kbqa/pipeline.h"
#include "kbqa/synthetic.h"

namespace kbqa::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// --config lines are appended as flags unless the flag was given explicitly.
std::vector<std::string> MergeConfig(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file " + path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> extra;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t b = line.find_first_not_of(" \t");
    if (b == std::string::npos || line[b] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(path, line_no, "expected key=value");
    auto trim = [](std::string s) {
      const std::size_t i = s.find_first_not_of(" \t");
      const std::size_t j = s.find_last_not_of(" \t");
      return i == std::string::npos ? std::string() : s.substr(i, j - i + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string flag = "--" + key;
    bool given = false;
    for (const std::string &a : args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
    }
    if (given || value == "false") continue;
    extra.push_back(flag);
    if (value != "true") extra.push_back(value);
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

std::uint64_t DefaultSeed() {
  const char *env = std::getenv("QAKB_SEED");
  if (env == nullptr || *env == '\0') return 42;
  std::size_t used = 0;
  const unsigned long long v = std::stoull(env, &used);
  if (used != std::string(env).size()) throw std::invalid_argument("QAKB_SEED is not a number");
  return v;
}

std::ifstream OpenIn(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

void WriteFile(const fs::path &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
}

std::vector<QuestionInstance> ReadQuestions(const std::string &path) {
  std::ifstream in = OpenIn(path);
  return parse_questions_tsv(in, path);
}

std::string SnapshotKind(const std::string &path) {
  const nn::ModelSnapshot snap = nn::load_model_snapshot(path);
  try {
    return nlohmann::json::parse(snap.metadata).at("kind").get<std::string>();
  } catch (const nlohmann::json::exception &e) {
    throw SnapshotError(path + ": bad metadata: " + e.what());
  }
}

struct Options {
  std::uint64_t seed = 42;
  std::string config;
  std::string log_level = "warning";
  std::size_t jobs = 1;

  // paths
  std::string out, facts, aliases, types, kb, questions, data, model, report_dir = ".";
  std::string word_vectors;

  // synth
  SyntheticSpec synth;

  // training
  TrainConfig train;
  E2EConfig e2e;
  std::string variant = "qa-t";
  bool variant_given = false;
  bool self_attention = false;
  bool char_level = false;

  // prediction
  std::vector<std::string> strategies;
  bool out_degree_sort = false;
  std::size_t top_k = 1;
  bool with_time = false;
};

const std::vector<std::string> kStrategyNames = {"p-qa", "p-qa-out", "p-qa-type",
                                                 "p-qa-out-type", "p-qa-type-out"};
const std::vector<std::string> kVariantNames = {"qa-s",     "qa-t",     "qa-t-w",
                                                "qa-t-ws",  "qa-t-wt",  "qa-t-swt",
                                                "qa-t-mwt", "qa-t-mwst"};

void AddCommon(CLI::App *sub, Options &o) {
  sub->add_option("--seed", o.seed, "random seed (default 42, or $QAKB_SEED)");
  sub->add_option("--config", o.config, "key=value file merged under explicit flags");
  sub->add_option("--log-level", o.log_level, "debug, info, warning, error or silent")
      ->check(CLI::IsMember({"debug", "info", "warning", "error", "silent"}));
}

void AddPipelineDims(CLI::App *sub, Options &o) {
  sub->add_option("--hidden", o.train.hidden, "recurrent state size");
  sub->add_option("--embed-dim", o.train.embed_dim, "word embedding size");
  sub->add_option("--epochs", o.train.epochs);
  sub->add_option("--lr", o.train.lr, "Adam learning rate");
  sub->add_option("--dropout", o.train.dropout);
  sub->add_option("--word-vectors", o.word_vectors, "pre-trained vectors, 'token v1 .. vd'")
      ->check(CLI::ExistingFile);
}

void AddE2EDims(CLI::App *sub, Options &o) {
  sub->add_option("--hidden", o.e2e.hidden, "shared LSTM state size");
  sub->add_option("--word-dim", o.e2e.word_dim);
  sub->add_option("--char-dim", o.e2e.char_dim);
  sub->add_option("--char-hidden", o.e2e.char_hidden);
  sub->add_option("--t-max", o.e2e.t_max, "tokens kept before flattening");
  sub->add_option("--epochs", o.e2e.epochs);
  sub->add_option("--lr", o.e2e.lr);
  sub->add_option("--gamma", o.e2e.gamma, "hinge margin");
  sub->add_option("--dropout", o.e2e.dropout);
  sub->add_option("--word-vectors", o.word_vectors)->check(CLI::ExistingFile);
}

E2EVariant ResolveVariant(const Options &o) {
  E2EVariant v = parse_variant(o.variant);
  v.self_attention = v.self_attention || o.self_attention;
  v.char_level = v.char_level || o.char_level;
  v.out_degree_sort = o.out_degree_sort;
  return v;
}

// ---------------------------------------------------------------- commands

int CmdSynth(const Options &o) {
  SyntheticSpec spec = o.synth;
  spec.seed = o.seed;
  const SyntheticData data = generate_synthetic(spec);
  write_synthetic(data, o.out);
  std::cerr << "synth: " << data.facts.size() << " facts, " << data.train.size() << " train / "
            << data.test.size() << " test questions, " << data.twins.size() << " twin pairs\n";
  return kOk;
}

int CmdIngest(const Options &o) {
  const KbBundle bundle = ingest_files(o.facts, o.aliases, o.types);
  save_kb_snapshot(o.out, bundle);
  std::cerr << "ingest: " << bundle.kb.num_facts() << " facts, " << bundle.kb.entities().size()
            << " entities\n";
  return kOk;
}

int CmdGenData(const Options &o) {
  const KbBundle bundle = load_kb_snapshot(o.kb);
  const auto questions = ReadQuestions(o.questions);
  const TrainingSets sets = generate_training_sets(questions, bundle.kb, bundle.index, o.seed);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  WriteFile(dir / "entity_labels.tsv", serialize_entity_labels(sets.entity_labels));
  WriteFile(dir / "relation_pairs.tsv", serialize_match_pairs(sets.relation_pairs, "relation"));
  WriteFile(dir / "type_pairs.tsv", serialize_match_pairs(sets.type_pairs, "type"));
  WriteFile(dir / "e2e_pools.tsv", serialize_pools(sets.pools));
  std::cerr << "gen-data: " << sets.entity_labels.size() << " labeled questions ("
            << sets.label_failures << " dropped), " << sets.relation_pairs.size()
            << " relation pairs, " << sets.type_pairs.size() << " type pairs\n";
  return kOk;
}

int CmdTrainPipeline(const Options &o) {
  TrainConfig cfg = o.train;
  cfg.seed = o.seed;
  cfg.word_vectors = o.word_vectors;
  const fs::path dir(o.data);
  auto open = [&](const char *name) { return OpenIn((dir / name).string()); };
  std::ifstream labels_in = open("entity_labels.tsv");
  const auto labels = parse_entity_labels(labels_in, (dir / "entity_labels.tsv").string());
  std::ifstream rel_in = open("relation_pairs.tsv");
  const auto rel_pairs = parse_match_pairs(rel_in, (dir / "relation_pairs.tsv").string());
  std::vector<MatchPair> type_pairs;
  if (fs::exists(dir / "type_pairs.tsv")) {
    std::ifstream type_in = open("type_pairs.tsv");
    type_pairs = parse_match_pairs(type_in, (dir / "type_pairs.tsv").string());
  }
  TrainStats st;
  TaggerModel tagger = train_tagger(labels, cfg, &st);
  std::cerr << "tagger: final loss " << st.epoch_loss.back() << "\n";
  MatcherModel relation = train_matcher(rel_pairs, cfg, &st);
  std::cerr << "relation matcher: final loss " << st.epoch_loss.back() << "\n";
  PipelineBundle bundle{std::move(tagger), std::move(relation), std::nullopt};
  if (!type_pairs.empty()) {
    bundle.type = train_matcher(type_pairs, cfg, &st);
    std::cerr << "type matcher: final loss " << st.epoch_loss.back() << "\n";
  }
  save_pipeline(o.out, bundle);
  return kOk;
}

int CmdTrainE2E(const Options &o) {
  E2EConfig cfg = o.e2e;
  cfg.seed = o.seed;
  cfg.word_vectors = o.word_vectors;
  const E2EVariant variant = ResolveVariant(o);
  const KbBundle bundle = load_kb_snapshot(o.kb);
  const auto questions = ReadQuestions(o.questions);
  const fs::path pools_path = fs::path(o.data) / "e2e_pools.tsv";
  std::ifstream pools_in = OpenIn(pools_path.string());
  NegativePools pools = parse_pools(pools_in, pools_path.string());
  E2EStats st;
  const E2EModel model = train_e2e(questions, pools, bundle.kb, variant, cfg, &st);
  std::cerr << variant_name(model.variant()) << ": final loss " << st.epoch_loss.back() << "\n";
  save_e2e(o.out, model);
  return kOk;
}

struct LoadedModel {
  std::optional<PipelineBundle> pipeline;
  std::optional<E2EModel> e2e;
};

LoadedModel LoadModel(const Options &o) {
  LoadedModel m;
  const std::string kind = SnapshotKind(o.model);
  if (kind == "pipeline") {
    m.pipeline = load_pipeline(o.model);
    if (o.variant_given) throw std::invalid_argument("--variant applies to end-to-end models");
  } else if (kind == "e2e") {
    m.e2e = load_e2e(o.model);
    if (o.variant_given) {
      const E2EVariant want = ResolveVariant(o);
      const E2EVariant &have = m.e2e->variant();
      if (want.head != have.head || want.char_level != have.char_level ||
          want.self_attention != have.self_attention ||
          want.type_in_label != have.type_in_label || want.type_as_task != have.type_as_task) {
        throw std::invalid_argument("model was trained as " + variant_name(have) + ", not " +
                                    variant_name(want));
      }
    }
  } else {
    throw SnapshotError(o.model + ": unknown model kind '" + kind + "'");
  }
  return m;
}

std::vector<Strategy> ResolveStrategies(const Options &o, const PipelineBundle &b) {
  std::vector<Strategy> out;
  if (o.strategies.empty()) {
    out = {Strategy::kPqa, Strategy::kPqaOut};
    if (b.type) {
      out.insert(out.end(), {Strategy::kPqaType, Strategy::kPqaOutType, Strategy::kPqaTypeOut});
    }
    return out;
  }
  for (const std::string &s : o.strategies) {
    out.push_back(parse_strategy(s));
    if (strategy_uses_type(out.back()) && !b.type) {
      throw std::invalid_argument(s + " needs a model trained with type pairs");
    }
  }
  return out;
}

ordered_json AnswerPipeline(const std::string &text, Strategy strategy, const PipelineBundle &b,
                            const KbBundle &kb) {
  ordered_json j;
  j["question"] = text;
  j["strategy"] = strategy_name(strategy);
  const QuestionInstance q = QuestionInstance::make(text, Fact{});
  try {
    const Prediction p = predict(strategy, q, b.models(), kb.kb, kb.index);
    j["entity"] = p.entity.str();
    j["relation"] = p.relation;
    ordered_json objs = ordered_json::array();
    for (const EntityId &e : p.objects) objs.push_back(e.str());
    j["objects"] = objs;
    j["scores"] = {{"s_r", p.s_r}, {"s_t", p.s_t ? ordered_json(*p.s_t) : ordered_json()},
                   {"s", p.s}};
    j["spans"] = p.spans;
  } catch (const NoCandidates &e) {
    j["error"] = e.what();
  } catch (const NoRelation &e) {
    j["error"] = e.what();
  }
  return j;
}

ordered_json AnswerE2E(const std::string &text, const E2EModel &model, bool out_degree_sort,
                       std::size_t k, const KbBundle &kb) {
  ordered_json j;
  j["question"] = text;
  j["strategy"] = variant_name(model.variant()) + (out_degree_sort ? "+out-degree-sort" : "");
  try {
    const auto ranked = answer(model, kb.kb, kb.index, tokenize(text), out_degree_sort, k);
    const FactScore &top = ranked.front();
    j["entity"] = top.fact.subject.str();
    j["relation"] = top.fact.relation;
    j["objects"] = ordered_json::array();
    for (const EntityId &e : kb.kb.lookup_objects(top.fact.subject, top.fact.relation)) {
      j["objects"].push_back(e.str());
    }
    ordered_json list = ordered_json::array();
    for (const FactScore &f : ranked) {
      list.push_back({{"entity", f.fact.subject.str()},
                      {"relation", f.fact.relation},
                      {"object", f.fact.object.str()},
                      {"s_qs", f.s_qs},
                      {"s_qp", f.s_qp},
                      {"s_qt", f.s_qt ? ordered_json(*f.s_qt) : ordered_json()},
                      {"combined", f.combined}});
    }
    j["answers"] = list;
  } catch (const NoCandidates &e) {
    j["error"] = e.what();
  } catch (const EmptySequence &e) {
    j["error"] = e.what();
  }
  return j;
}

int CmdAnswer(const Options &o) {
  const KbBundle kb = load_kb_snapshot(o.kb);
  const LoadedModel m = LoadModel(o);
  std::optional<Strategy> strategy;
  if (m.pipeline) {
    if (o.strategies.size() > 1) throw std::invalid_argument("answer takes one --strategy");
    strategy = o.strategies.empty() ? Strategy::kPqa : parse_strategy(o.strategies.front());
    if (strategy_uses_type(*strategy) && !m.pipeline->type) {
      throw std::invalid_argument(o.strategies.front() + " needs a model trained with type pairs");
    }
  }
  std::ifstream file;
  if (!o.questions.empty()) file = OpenIn(o.questions);
  std::istream &in = o.questions.empty() ? std::cin : file;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const ordered_json j = m.pipeline
                               ? AnswerPipeline(line, *strategy, *m.pipeline, kb)
                               : AnswerE2E(line, *m.e2e, o.out_degree_sort, o.top_k, kb);
    std::cout << j.dump() << std::endl;
  }
  return kOk;
}

int CmdEval(const Options &o) {
  const KbBundle kb = load_kb_snapshot(o.kb);
  const LoadedModel m = LoadModel(o);
  const auto questions = ReadQuestions(o.questions);
  std::vector<EvalReport> reports;
  if (m.pipeline) {
    for (Strategy s : ResolveStrategies(o, *m.pipeline)) {
      const PipelineModels models = m.pipeline->models();
      reports.push_back(evaluate(
          strategy_name(s), questions, kb.kb,
          [&](const QuestionInstance &q) -> std::optional<PredictedPair> {
            const Prediction p = predict(s, q, models, kb.kb, kb.index);
            return PredictedPair{p.entity, p.relation};
          },
          o.jobs));
    }
  } else {
    const E2EModel &model = *m.e2e;
    const std::string name =
        variant_name(model.variant()) + (o.out_degree_sort ? "+out-degree-sort" : "");
    reports.push_back(evaluate(
        name, questions, kb.kb,
        [&](const QuestionInstance &q) -> std::optional<PredictedPair> {
          const auto ranked = answer(model, kb.kb, kb.index, q.tokens, o.out_degree_sort, 1);
          return PredictedPair{ranked.front().fact.subject, ranked.front().fact.relation};
        },
        o.jobs));
  }
  const fs::path dir(o.report_dir);
  fs::create_directories(dir);
  report_write(reports, (dir / "report.json").string(), (dir / "report.txt").string(),
               o.with_time);
  std::cout << report_table(reports);
  for (const EvalReport &r : reports) {
    std::cerr << r.approach << ": " << r.n << " questions in " << r.wall_time_s << " s\n";
  }
  return kOk;
}

LogLevel ParseLevel(const std::string &s) {
  if (s == "debug") return LogLevel::kDebug;
  if (s == "info") return LogLevel::kInfo;
  if (s == "error") return LogLevel::kError;
  if (s == "silent") return LogLevel::kSilent;
  return LogLevel::kWarning;
}

}  // namespace

int run(const std::vector<std::string> &raw_args) {
  Options o;
  std::vector<std::string> args;
  try {
    o.seed = DefaultSeed();
    args = MergeConfig(raw_args);
  } catch (const DataError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  CLI::App app{"Single-relation question answering over a triple store."};
  app.name("kbqa");
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  CLI::App *synth = app.add_subcommand("synth", "write a seeded synthetic benchmark");
  AddCommon(synth, o);
  synth->add_option("--out", o.out, "output directory")->required();
  synth->add_option("--entities", o.synth.n_entities);
  synth->add_option("--relations", o.synth.n_relations);
  synth->add_option("--collision-rate", o.synth.collision_rate)->check(CLI::Range(0.0, 1.0));
  synth->add_flag("--outdegree-gap", o.synth.twin_outdegree_gap);
  synth->add_flag("--type-distinct", o.synth.twin_type_distinct);
  synth->add_option("--train-fraction", o.synth.train_fraction)->check(CLI::Range(0.0, 1.0));

  CLI::App *ingest = app.add_subcommand("ingest", "build a KB snapshot with its alias index");
  AddCommon(ingest, o);
  ingest->add_option("--facts", o.facts, "subject<TAB>relation<TAB>object TSV")
      ->required()
      ->check(CLI::ExistingFile);
  ingest->add_option("--aliases", o.aliases, "mid<TAB>alias TSV")->check(CLI::ExistingFile);
  ingest->add_option("--types", o.types, "notable types, TSV or N-Triples")
      ->check(CLI::ExistingFile);
  ingest->add_option("--out", o.out, "snapshot path")->required();

  CLI::App *gen = app.add_subcommand("gen-data", "build training sets from questions");
  AddCommon(gen, o);
  gen->add_option("--kb", o.kb)->required()->check(CLI::ExistingFile);
  gen->add_option("--questions", o.questions)->required()->check(CLI::ExistingFile);
  gen->add_option("--out", o.out, "output directory")->required();

  CLI::App *tp = app.add_subcommand("train-pipeline", "train tagger and matchers");
  AddCommon(tp, o);
  tp->add_option("--data", o.data, "gen-data output directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  tp->add_option("--out", o.out, "model path")->required();
  AddPipelineDims(tp, o);

  CLI::App *te = app.add_subcommand("train-e2e", "train an end-to-end model");
  AddCommon(te, o);
  te->add_option("--kb", o.kb)->required()->check(CLI::ExistingFile);
  te->add_option("--questions", o.questions, "questions used for gen-data")
      ->required()
      ->check(CLI::ExistingFile);
  te->add_option("--data", o.data, "gen-data output directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  te->add_option("--variant", o.variant)->check(CLI::IsMember(kVariantNames));
  te->add_flag("--self-attention", o.self_attention);
  te->add_flag("--char-level", o.char_level);
  te->add_option("--out", o.out, "model path")->required();
  AddE2EDims(te, o);

  CLI::App *ans = app.add_subcommand("answer", "answer questions, one JSON line each");
  AddCommon(ans, o);
  ans->add_option("--kb", o.kb)->required()->check(CLI::ExistingFile);
  ans->add_option("--model", o.model)->required()->check(CLI::ExistingFile);
  ans->add_option("--questions", o.questions, "one question per line (default: stdin)")
      ->check(CLI::ExistingFile);
  ans->add_option("--strategy", o.strategies)->check(CLI::IsMember(kStrategyNames));
  CLI::Option *ans_variant =
      ans->add_option("--variant", o.variant)->check(CLI::IsMember(kVariantNames));
  ans->add_flag("--self-attention", o.self_attention);
  ans->add_flag("--char-level", o.char_level);
  ans->add_flag("--out-degree-sort", o.out_degree_sort);
  ans->add_option("--top-k", o.top_k)->check(CLI::PositiveNumber);

  CLI::App *ev = app.add_subcommand("eval", "evaluate and write report.json / report.txt");
  AddCommon(ev, o);
  ev->add_option("--kb", o.kb)->required()->check(CLI::ExistingFile);
  ev->add_option("--model", o.model)->required()->check(CLI::ExistingFile);
  ev->add_option("--questions", o.questions)->required()->check(CLI::ExistingFile);
  ev->add_option("--strategy", o.strategies)->check(CLI::IsMember(kStrategyNames));
  CLI::Option *ev_variant =
      ev->add_option("--variant", o.variant)->check(CLI::IsMember(kVariantNames));
  ev->add_flag("--self-attention", o.self_attention);
  ev->add_flag("--char-level", o.char_level);
  ev->add_flag("--out-degree-sort", o.out_degree_sort);
  ev->add_option("--report-dir", o.report_dir);
  ev->add_option("--jobs", o.jobs, "evaluation threads")->check(CLI::PositiveNumber);
  ev->add_flag("--with-time", o.with_time, "record wall time in report.json");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e, std::cerr, std::cerr);
    return kUsage;
  }
  o.variant_given = ans_variant->count() > 0 || ev_variant->count() > 0;
  set_log_level(ParseLevel(o.log_level));

  try {
    if (synth->parsed()) return CmdSynth(o);
    if (ingest->parsed()) return CmdIngest(o);
    if (gen->parsed()) return CmdGenData(o);
    if (tp->parsed()) return CmdTrainPipeline(o);
    if (te->parsed()) return CmdTrainE2E(o);
    if (ans->parsed()) return CmdAnswer(o);
    if (ev->parsed()) return CmdEval(o);
  } catch (const std::invalid_argument &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError &e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace kbqa::cli
