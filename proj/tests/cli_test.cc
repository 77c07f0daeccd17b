// Copyright (c) 2026 The phonrich Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "phonrich/cli.h"
#include "phonrich/io.h"

namespace phonrich {
namespace {

namespace fs = std::filesystem;

const char* kSampleDict = PHONRICH_TEST_DATA_DIR "/sample.dict";

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("phonrich_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int Run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return RunCli(args, out_, err_);
  }
  std::string P(const std::string& name) const { return (dir_ / name).string(); }
  void Write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(Run({"--help"}), 0);
  EXPECT_NE(out_.str().find("gen-protocol"), std::string::npos);
  EXPECT_NE(Run({}), 0);
  EXPECT_NE(Run({"frobnicate"}), 0);
  // --seed is mandatory for seeded subcommands.
  EXPECT_NE(Run({"simulate", "--out-prefix", P("s")}), 0);
  EXPECT_NE(Run({"evaluate", "--scores", P("missing.tsv"), "--seed", "1"}), 0);
}

TEST_F(CliTest, G2pRichnessAndSummary) {
  Write("t.jsonl",
        "{\"utterance_id\": \"u1\", \"transcript\": \"Cat, speaker!\", "
        "\"net_speech\": 1.5}\n"
        "{\"utterance_id\": \"u2\", \"transcript\": \"zorkmid\", "
        "\"net_speech\": 0.4}\n");
  ASSERT_EQ(Run({"g2p", "--transcripts", P("t.jsonl"), "--lexicon", kSampleDict,
                 "--out", P("p.jsonl")}),
            0)
      << err_.str();
  EXPECT_NE(err_.str().find("warning"), std::string::npos);
  std::istringstream lines(Slurp(P("p.jsonl")));
  std::vector<nlohmann::json> records;
  std::string line;
  while (std::getline(lines, line)) records.push_back(nlohmann::json::parse(line));
  ASSERT_EQ(records.size(), 4u);
  EXPECT_TRUE(records[0].contains("_provenance"));
  EXPECT_EQ(records[1]["phonemes"], "K AE T S P IY K ER");
  EXPECT_EQ(records[1]["cu"], 7);
  EXPECT_EQ(records[2]["cu"], 0);
  EXPECT_EQ(records[3]["_summary"]["oov_words"], 1);
  EXPECT_EQ(records[3]["_summary"]["words"], 3);

  ASSERT_EQ(Run({"richness", "--presence", P("p.jsonl"), "--out", P("q.jsonl")}),
            0)
      << err_.str();
  auto q = ReadQmfsFile(P("q.jsonl"));
  EXPECT_EQ(q.at("u1").cu, 7);
  EXPECT_EQ(q.at("u1").net_speech, 1.5);
}

TEST_F(CliTest, LexiconErrorNamesLine) {
  Write("bad.dict", "cat K AE1 T\ndog D QX G\n");
  Write("t.jsonl", "{\"utterance_id\": \"u1\", \"transcript\": \"cat\"}\n");
  EXPECT_NE(Run({"g2p", "--transcripts", P("t.jsonl"), "--lexicon",
                 P("bad.dict")}),
            0);
  EXPECT_NE(err_.str().find("bad.dict:2"), std::string::npos);
}

TEST_F(CliTest, SimulateWeightsCalibrateEvaluateStats) {
  ASSERT_EQ(Run({"simulate", "--seed", "3", "--speakers", "6",
                 "--probes-per-speaker", "40", "--out-prefix", P("sim")}),
            0)
      << err_.str();
  for (const char* ext : {".scores.tsv", ".qmf.jsonl", ".corpus.jsonl",
                          ".lexicon.txt", ".trials.tsv", ".tests.jsonl",
                          ".models.jsonl"}) {
    EXPECT_TRUE(fs::exists(P(std::string("sim") + ext))) << ext;
  }
  // Presence records for the simulated probes, then weights on them.
  std::ifstream tests(P("sim.tests.jsonl"));
  std::ofstream transcripts(P("tr.jsonl"));
  std::string line;
  while (std::getline(tests, line)) {
    auto j = nlohmann::json::parse(line);
    if (!j.contains("test_id")) continue;
    nlohmann::json t;
    t["utterance_id"] = j["test_id"];
    t["transcript"] = j["transcript"];
    t["net_speech"] = j["net_speech"];
    transcripts << t.dump() << '\n';
  }
  transcripts.close();
  ASSERT_EQ(Run({"g2p", "--transcripts", P("tr.jsonl"), "--lexicon",
                 P("sim.lexicon.txt"), "--out", P("pres.jsonl")}),
            0)
      << err_.str();
  ASSERT_EQ(Run({"fit-weights", "--presence", P("pres.jsonl"), "--scores",
                 P("sim.scores.tsv"), "--out", P("w.txt")}),
            0)
      << err_.str();
  ASSERT_EQ(Run({"report-weights", "--weights", P("w.txt"), "--presence",
                 P("pres.jsonl")}),
            0)
      << err_.str();
  EXPECT_NE(out_.str().find("phoneme\tnormalized_weight\tfrequency"),
            std::string::npos);
  ASSERT_EQ(Run({"richness", "--presence", P("pres.jsonl"), "--weights",
                 P("w.txt"), "--out", P("q.jsonl")}),
            0)
      << err_.str();

  ASSERT_EQ(Run({"evaluate", "--scores", P("sim.scores.tsv"), "--qmf",
                 P("q.jsonl"), "--seed", "1"}),
            0)
      << err_.str();
  const std::string report = out_.str();
  for (const char* row : {"\nnone\t", "\nraw\t", "\nraw,lns\t", "\nraw,cu\t",
                          "\nraw,wcu\t", "\nraw,lns,cu\t", "\nraw,lns,wcu\t"}) {
    EXPECT_NE(report.find(row), std::string::npos) << row;
  }

  ASSERT_EQ(Run({"calibrate", "--scores", P("sim.scores.tsv"), "--qmf",
                 P("q.jsonl"), "--features", "raw,cu", "--seed", "1", "--out",
                 P("cal.tsv"), "--models-prefix", P("cal")}),
            0)
      << err_.str();
  EXPECT_EQ(ReadScoresFile(P("cal.tsv")).size(),
            ReadScoresFile(P("sim.scores.tsv")).size());
  EXPECT_TRUE(fs::exists(P("cal.fold4.model")));

  ASSERT_EQ(Run({"stats", "--qmf", P("q.jsonl"), "--scores",
                 P("sim.scores.tsv"), "--scatter", P("scatter.csv")}),
            0)
      << err_.str();
  EXPECT_NE(out_.str().find("target\tCU\t"), std::string::npos);
  EXPECT_NE(out_.str().find("target\tWCU\t"), std::string::npos);
  EXPECT_EQ(Slurp(P("scatter.csv")).rfind("test_id,qmf_name,qmf_value,score,label\n", 0),
            0u);
}

TEST_F(CliTest, CalibrateNeedsEnoughTrialsPerFold) {
  Write("s.tsv",
        "model_id\ttest_id\tlabel\traw_score\n"
        "m\ta\ttarget\t0.9\nm\tb\tnontarget\t0.1\nm\tc\tnontarget\t0.2\n");
  EXPECT_NE(Run({"calibrate", "--scores", P("s.tsv"), "--seed", "1"}), 0);
  EXPECT_NE(err_.str().find("folds"), std::string::npos);
}

TEST_F(CliTest, SeededSubcommandsAreByteIdentical) {
  ASSERT_EQ(Run({"simulate", "--seed", "9", "--speakers", "4",
                 "--probes-per-speaker", "20", "--out-prefix", P("a")}),
            0);
  ASSERT_EQ(Run({"simulate", "--seed", "9", "--speakers", "4",
                 "--probes-per-speaker", "20", "--out-prefix", P("b")}),
            0);
  for (const char* ext : {".scores.tsv", ".qmf.jsonl", ".trials.tsv",
                          ".tests.jsonl", ".models.jsonl", ".corpus.jsonl"}) {
    EXPECT_EQ(Slurp(P(std::string("a") + ext)), Slurp(P(std::string("b") + ext)))
        << ext;
  }
  ASSERT_EQ(Run({"gen-protocol", "--kind", "clip", "--utterances",
                 P("a.corpus.jsonl"), "--seed", "2", "--target-seconds", "1",
                 "--out-prefix", P("c1")}),
            0)
      << err_.str();
  ASSERT_EQ(Run({"gen-protocol", "--kind", "clip", "--utterances",
                 P("a.corpus.jsonl"), "--seed", "2", "--target-seconds", "1",
                 "--out-prefix", P("c2")}),
            0);
  EXPECT_EQ(Slurp(P("c1.tests.jsonl")), Slurp(P("c2.tests.jsonl")));
  for (const char* out : {"e1.tsv", "e2.tsv"}) {
    ASSERT_EQ(Run({"evaluate", "--scores", P("a.scores.tsv"), "--qmf",
                   P("a.qmf.jsonl"), "--seed", "4", "--out", P(out)}),
              0);
  }
  EXPECT_EQ(Slurp(P("e1.tsv")), Slurp(P("e2.tsv")));
}

}  // namespace
}  // namespace phonrich
