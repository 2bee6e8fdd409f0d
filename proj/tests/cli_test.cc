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


#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "kbqa/eval.h"
#include "test_util.h"

namespace kbqa {
namespace {

// Runs the CLI with stdout and stderr captured; returns the exit status.
int Run(const testing::TempDir &dir, const std::string &args) {
  const std::string cmd = std::string("cd '") + dir.str() + "' && '" + KBQA_CLI_PATH + "' " +
                          args + " >out.txt 2>err.txt";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string Micro(const char *name) { return testing::data_path(std::string("micro/") + name); }

TEST_SUITE("cli") {
  TEST_CASE("usage errors") {
    testing::TempDir dir("cli_usage");
    CHECK(Run(dir, "synth --out x --bogus") == 1);
    CHECK(testing::read_file(dir.file("err.txt")).find("--bogus") != std::string::npos);
    CHECK(Run(dir, "") == 1);
    CHECK(Run(dir, "train-e2e --kb nope.snap --questions q --data d --out m") == 1);
    CHECK(Run(dir, "--help") == 0);
  }

  TEST_CASE("data errors") {
    testing::TempDir dir("cli_data");
    testing::write_file(dir.file("bad.tsv"), "m.a\t/r/r/x\n");
    CHECK(Run(dir, "ingest --facts bad.tsv --out kb.snap") == 2);
    CHECK(testing::read_file(dir.file("err.txt")).find("bad.tsv") != std::string::npos);
    testing::write_file(dir.file("junk.snap"), "not a snapshot");
    testing::write_file(dir.file("q.tsv"), "m.a\tr\tm.b\twhat\n");
    CHECK(Run(dir, "gen-data --kb junk.snap --questions q.tsv --out d") == 2);
  }

  TEST_CASE("pipeline smoke run") {
    testing::TempDir dir("cli_smoke");
    REQUIRE(Run(dir, "synth --seed 1 --entities 20 --collision-rate 0.3 --outdegree-gap --out syn") == 0);
    REQUIRE(Run(dir, "ingest --facts syn/facts.tsv --aliases syn/aliases.tsv --types syn/types.tsv --out kb.snap") == 0);
    REQUIRE(Run(dir, "gen-data --kb kb.snap --questions syn/train.tsv --out data") == 0);
    REQUIRE(Run(dir, "train-pipeline --data data --epochs 2 --out pipe.nnqa") == 0);
    REQUIRE(Run(dir, "eval --kb kb.snap --model pipe.nnqa --questions syn/test.tsv --strategy p-qa-out --report-dir rep") == 0);
    const auto reports = parse_report_json(testing::read_file(dir.file("rep/report.json")));
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].approach == "p-qa-out");
    CHECK(reports[0].accuracy >= 0.0);
    CHECK(reports[0].accuracy <= 1.0);
    CHECK(reports[0].correct + reports[0].errors() == reports[0].n);
    CHECK(testing::read_file(dir.file("rep/report.txt")).find("p-qa-out") != std::string::npos);

    // Pipeline models reject end-to-end options.
    CHECK(Run(dir, "eval --kb kb.snap --model pipe.nnqa --questions syn/test.tsv --variant qa-t") == 1);
  }

  TEST_CASE("micro KB answers a known question") {
    testing::TempDir dir("cli_micro");
    REQUIRE(Run(dir, "ingest --facts '" + Micro("facts.tsv") + "' --aliases '" + Micro("aliases.tsv") +
                         "' --types '" + Micro("types.tsv") + "' --out kb.snap") == 0);
    REQUIRE(Run(dir, "gen-data --kb kb.snap --questions '" + Micro("questions.tsv") + "' --out data") == 0);
    REQUIRE(Run(dir, "train-e2e --kb kb.snap --questions '" + Micro("questions.tsv") +
                         "' --data data --variant qa-t-mwst --epochs 30 --out m.nnqa") == 0);
    testing::write_file(dir.file("ask.txt"), "where was obama born\n");
    REQUIRE(Run(dir, "answer --kb kb.snap --model m.nnqa --variant qa-t-mwst --out-degree-sort "
                     "--questions ask.txt") == 0);
    const auto j = nlohmann::json::parse(testing::read_file(dir.file("out.txt")));
    CHECK(j.at("strategy") == "qa-t-mwst+out-degree-sort");
    REQUIRE(j.contains("objects"));
    const auto objects = j.at("objects").get<std::vector<std::string>>();
    CHECK(std::find(objects.begin(), objects.end(), "m.02hrh0_") != objects.end());

    CHECK(Run(dir, "answer --kb kb.snap --model m.nnqa --variant qa-s --questions ask.txt") == 1);
  }
}

}  // namespace
}  // namespace kbqa
