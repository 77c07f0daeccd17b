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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "metric_oracles.h"
#include "phonrich/metrics.h"

namespace phonrich {
namespace {

std::vector<TrialRecord> MakeTrials(const std::vector<double>& tgt,
                                    const std::vector<double>& non) {
  std::vector<TrialRecord> trials;
  int i = 0;
  for (double s : tgt) {
    trials.push_back({"m", "t" + std::to_string(i++), Label::kTarget, s});
  }
  for (double s : non) {
    trials.push_back({"m", "t" + std::to_string(i++), Label::kNontarget, s});
  }
  return trials;
}

// Random instance; about half use a coarse grid so ties are common.
void RandomScores(std::mt19937_64& rng, std::vector<double>& tgt,
                  std::vector<double>& non) {
  std::uniform_int_distribution<int> size(1, 100);
  std::bernoulli_distribution coarse(0.5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> grid(0, 8);
  const bool use_grid = coarse(rng);
  const double shift = gauss(rng);
  auto draw = [&](double mean) {
    return use_grid ? static_cast<double>(grid(rng)) + (mean > 0 ? 1 : 0)
                    : gauss(rng) + mean;
  };
  tgt.assign(size(rng), 0.0);
  non.assign(size(rng), 0.0);
  for (auto& s : tgt) s = draw(shift);
  for (auto& s : non) s = draw(0.0);
}

TEST(EerTest, Examples) {
  EXPECT_EQ(ComputeEer(std::vector{0.9, 0.8}, std::vector{0.1, 0.2}).eer, 0.0);
  EXPECT_DOUBLE_EQ(
      ComputeEer(std::vector{0.1, 0.5, 0.5, 0.9}, std::vector{0.5, 0.9, 0.1, 0.5})
          .eer,
      0.5);
  EXPECT_NEAR(
      ComputeEer(std::vector{0.8, 0.6, 0.4}, std::vector{0.7, 0.3, 0.2}).eer,
      1.0 / 3.0, 1e-15);
}

TEST(EerTest, ThresholdLiesBetweenClassesWhenSeparated) {
  auto r = ComputeEer(std::vector{0.9, 0.8}, std::vector{0.1, 0.2});
  EXPECT_GT(r.threshold, 0.2);
  EXPECT_LE(r.threshold, 0.8);
}

TEST(EerTest, MissingClassThrows) {
  EXPECT_THROW(ComputeEer(std::vector<double>{}, std::vector{0.1}),
               std::invalid_argument);
  auto trials = MakeTrials({0.3, 0.4}, {});
  EXPECT_THROW(ComputeEer(trials), std::invalid_argument);
}

TEST(EerTest, MatchesOracle) {
  std::mt19937_64 rng(101);
  std::vector<double> tgt, non;
  for (int i = 0; i < 500; ++i) {
    RandomScores(rng, tgt, non);
    ASSERT_NEAR(ComputeEer(tgt, non).eer, oracle::Eer(tgt, non), 1e-12);
  }
}

TEST(EerTest, InvariantUnderIncreasingTransform) {
  std::mt19937_64 rng(7);
  std::vector<double> tgt, non;
  for (int i = 0; i < 100; ++i) {
    RandomScores(rng, tgt, non);
    const double before = ComputeEer(tgt, non).eer;
    auto f = [](double s) { return std::exp(0.5 * s) * 3.0 - 2.0; };
    std::transform(tgt.begin(), tgt.end(), tgt.begin(), f);
    std::transform(non.begin(), non.end(), non.begin(), f);
    ASSERT_NEAR(ComputeEer(tgt, non).eer, before, 1e-12);
  }
}

TEST(EerTest, SwappingClassesAndNegatingKeepsEer) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> tgt(40), non(70);
    for (auto& s : tgt) s = gauss(rng) + 1.0;
    for (auto& s : non) s = gauss(rng);
    std::vector<double> ntgt, nnon;
    for (double s : non) ntgt.push_back(-s);
    for (double s : tgt) nnon.push_back(-s);
    ASSERT_NEAR(ComputeEer(tgt, non).eer, ComputeEer(ntgt, nnon).eer, 1e-12);
  }
}

TEST(MinCPrimaryTest, Examples) {
  EXPECT_EQ(ComputeMinCPrimary(std::vector{0.8, 0.6}, std::vector{0.5, 0.1}),
            0.0);
  EXPECT_DOUBLE_EQ(
      ComputeMinCPrimary(std::vector{0.4, 0.4, 0.7}, std::vector{0.7, 0.4, 0.4}),
      1.0);
  // One target below a nontarget: the best threshold misses it (FRR 1/2).
  EXPECT_DOUBLE_EQ(
      ComputeMinCPrimary(std::vector{0.8, 0.4}, std::vector{0.5, 0.1}), 0.5);
}

TEST(MinCPrimaryTest, MatchesOracleAndIsBounded) {
  std::mt19937_64 rng(202);
  std::vector<double> tgt, non;
  for (int i = 0; i < 500; ++i) {
    RandomScores(rng, tgt, non);
    const double got = ComputeMinCPrimary(tgt, non);
    ASSERT_NEAR(got, oracle::MinCPrimary(tgt, non), 1e-12);
    ASSERT_LE(got, 1.0 + 1e-12);
    ASSERT_GE(got, 0.0);
  }
}

TEST(MinDcfTest, RejectsBadPrior) {
  EXPECT_THROW(ComputeMinDcf(std::vector{1.0}, std::vector{0.0}, 0.0),
               std::invalid_argument);
}

TEST(EvaluateTest, Report) {
  auto trials = MakeTrials({0.8, 0.6, 0.4}, {0.7, 0.3, 0.2});
  auto r = Evaluate(trials);
  EXPECT_NEAR(r.eer, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(r.n_target, 3u);
  EXPECT_EQ(r.n_nontarget, 3u);
  trials[0].raw_score = std::nan("");
  EXPECT_THROW(Evaluate(trials), std::invalid_argument);
}

TEST(KendallTauTest, Examples) {
  std::vector<double> x{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(KendallTau(x, x), 1.0);
  std::vector<double> rev{4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(KendallTau(x, rev), -1.0);
  EXPECT_NEAR(KendallTau(x, std::vector<double>{1, 3, 2, 4}), 2.0 / 3.0,
              1e-15);
}

TEST(KendallTauTest, Errors) {
  std::vector<double> x{1, 2, 3};
  EXPECT_THROW(KendallTau(x, std::vector<double>{1, 2}),
               std::invalid_argument);
  EXPECT_THROW(KendallTau(x, std::vector<double>{5, 5, 5}),
               std::invalid_argument);
  EXPECT_THROW(KendallTau(std::vector<double>{1}, std::vector<double>{1}),
               std::invalid_argument);
}

TEST(KendallTauTest, MatchesOracleAndIsSymmetric) {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int> size(2, 200);
  std::uniform_int_distribution<int> grid(0, 5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::bernoulli_distribution coarse(0.5);
  int checked = 0;
  while (checked < 500) {
    const int n = size(rng);
    std::vector<double> x(n), y(n);
    const bool cx = coarse(rng), cy = coarse(rng);
    for (int i = 0; i < n; ++i) {
      x[i] = cx ? grid(rng) : gauss(rng);
      y[i] = cy ? grid(rng) + 0.1 * x[i] : gauss(rng) + x[i];
    }
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; }) ||
        std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) {
      continue;
    }
    const double tau = KendallTau(x, y);
    ASSERT_NEAR(tau, oracle::KendallTauB(x, y), 1e-12);
    ASSERT_EQ(tau, KendallTau(y, x));
    ASSERT_NEAR(KendallTau(x, x), 1.0, 1e-15);
    ++checked;
  }
}

TEST(ProtocolStatsTest, Examples) {
  std::vector<UtteranceQuality> one{{2.0, 10}};
  auto s = ComputeProtocolStats(one);
  EXPECT_EQ(s.net_speech_mean, 2.0);
  EXPECT_EQ(s.cu_mean, 10.0);
  EXPECT_EQ(s.net_speech_std, 0.0);
  EXPECT_EQ(s.cu_std, 0.0);
  std::vector<UtteranceQuality> two{{1.0, 10}, {3.0, 20}};
  s = ComputeProtocolStats(two);
  EXPECT_DOUBLE_EQ(s.net_speech_mean, 2.0);
  EXPECT_DOUBLE_EQ(s.cu_mean, 15.0);
  EXPECT_DOUBLE_EQ(s.net_speech_std, 1.0);
  EXPECT_DOUBLE_EQ(s.cu_std, 5.0);
  EXPECT_EQ(s.n, 2u);
  EXPECT_THROW(ComputeProtocolStats({}), std::invalid_argument);
}

TEST(CorrelationReportTest, RowsAndScatter) {
  std::vector<TrialRecord> trials = {
      {"a", "u1", Label::kTarget, 0.9},    {"a", "u2", Label::kTarget, 0.5},
      {"a", "u3", Label::kTarget, 0.7},    {"b", "u1", Label::kNontarget, 0.1},
      {"b", "u2", Label::kNontarget, 0.3}, {"b", "u3", Label::kNontarget, 0.2},
  };
  QmfTable qmfs;
  qmfs["u1"] = {3.0, 30, std::nullopt};
  qmfs["u2"] = {1.0, 10, std::nullopt};
  qmfs["u3"] = {2.0, 20, std::nullopt};
  auto report = MakeCorrelationReport(trials, qmfs);
  ASSERT_EQ(report.rows.size(), 4u);  // CU and LNS per class
  for (const auto& row : report.rows) {
    EXPECT_EQ(row.n, 3u);
    if (row.label == Label::kTarget) {
      EXPECT_DOUBLE_EQ(row.tau, 1.0) << row.qmf_name;
    } else {
      EXPECT_DOUBLE_EQ(row.tau, -1.0) << row.qmf_name;
    }
  }
  EXPECT_EQ(report.scatter.size(), 12u);
  for (auto& [id, q] : qmfs) q.wcu = q.cu / 10.0;
  EXPECT_EQ(MakeCorrelationReport(trials, qmfs).rows.size(), 6u);
}

TEST(CorrelationReportTest, Errors) {
  std::vector<TrialRecord> trials = {
      {"a", "u1", Label::kTarget, 0.9},
      {"a", "u2", Label::kTarget, 0.5},
      {"b", "u1", Label::kNontarget, 0.1},
      {"b", "u2", Label::kNontarget, 0.3},
  };
  QmfTable qmfs;
  qmfs["u1"] = {3.0, 30, std::nullopt};
  EXPECT_ANY_THROW(MakeCorrelationReport(trials, qmfs));
  qmfs["u2"] = {3.0, 30, std::nullopt};  // constant QMF: tau undefined
  EXPECT_ANY_THROW(MakeCorrelationReport(trials, qmfs));
}

TEST(LogNetSpeechTest, Floors) {
  EXPECT_DOUBLE_EQ(LogNetSpeech(0.0), std::log(0.01));
  EXPECT_DOUBLE_EQ(LogNetSpeech(2.0), std::log(2.0));
}

}  // namespace
}  // namespace phonrich
