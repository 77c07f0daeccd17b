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

#ifndef PHONRICH_METRICS_H_
#define PHONRICH_METRICS_H_

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phonrich {

enum class Label { kTarget, kNontarget };

std::string_view LabelName(Label label);
// Accepts "target"/"nontarget" (also "1"/"0"); throws otherwise.
Label ParseLabel(std::string_view text);

struct TrialRecord {
  std::string model_id;
  std::string test_id;
  Label label = Label::kNontarget;
  double raw_score = 0.0;

  bool operator==(const TrialRecord&) const = default;
};

// Score lists split by class. Trials must have finite scores.
struct ScoreSets {
  std::vector<double> target;
  std::vector<double> nontarget;
};
ScoreSets SplitByLabel(std::span<const TrialRecord> trials);

// Decisions accept a trial iff score >= threshold.
struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

// Sweeps thresholds over the sorted distinct scores (plus one above the
// maximum, where nothing is accepted) and linearly interpolates between the
// two adjacent operating points where FAR - FRR changes sign.
EerResult ComputeEer(std::span<const double> target,
                     std::span<const double> nontarget);
EerResult ComputeEer(std::span<const TrialRecord> trials);

// Target priors of the two operating points averaged by minC_primary.
inline constexpr std::array<double, 2> kPrimaryTargetPriors = {0.01, 0.005};

// Normalized minimum detection cost at one target prior with unit costs.
double ComputeMinDcf(std::span<const double> target,
                     std::span<const double> nontarget, double p_target);

// Mean of the normalized minDCF at kPrimaryTargetPriors.
double ComputeMinCPrimary(std::span<const double> target,
                          std::span<const double> nontarget);
double ComputeMinCPrimary(std::span<const TrialRecord> trials);

struct MetricsReport {
  double eer = 0.0;
  double min_c_primary = 0.0;
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;
  double threshold_at_eer = 0.0;
};
MetricsReport Evaluate(std::span<const TrialRecord> trials);

// Kendall's tau-b in O(n log n). Throws on length mismatch, n < 2,
// non-finite input, or when either list is entirely tied.
double KendallTau(std::span<const double> x, std::span<const double> y);

// Quality measures of one test utterance.
struct QmfRecord {
  double net_speech = 0.0;
  double cu = 0.0;
  std::optional<double> wcu;
};
using QmfTable = std::map<std::string, QmfRecord, std::less<>>;

// Natural log of net speech floored at 0.01 s.
double LogNetSpeech(double net_speech);

struct CorrelationRow {
  Label label = Label::kTarget;
  std::string qmf_name;  // "CU", "WCU" or "LNS"
  std::size_t n = 0;
  double tau = 0.0;
};

struct ScatterRow {
  std::string test_id;
  std::string qmf_name;
  double qmf_value = 0.0;
  double score = 0.0;
  Label label = Label::kTarget;
};

struct CorrelationReport {
  std::vector<CorrelationRow> rows;
  std::vector<ScatterRow> scatter;
};

// Kendall's tau between each QMF and raw score, per class. WCU is included
// only when every trial's QMF record has it. Throws if a trial has no QMF
// record or a class is absent.
CorrelationReport MakeCorrelationReport(std::span<const TrialRecord> trials,
                                        const QmfTable& qmfs);

struct ProtocolStats {
  std::size_t n = 0;
  double net_speech_mean = 0.0;
  double net_speech_std = 0.0;
  double cu_mean = 0.0;
  double cu_std = 0.0;
};

struct UtteranceQuality {
  double net_speech = 0.0;
  double cu = 0.0;
};

// Arithmetic means and population standard deviations.
ProtocolStats ComputeProtocolStats(std::span<const UtteranceQuality> utts);

}  // namespace phonrich

#endif  // PHONRICH_METRICS_H_
