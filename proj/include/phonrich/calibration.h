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

#ifndef PHONRICH_CALIBRATION_H_
#define PHONRICH_CALIBRATION_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phonrich/metrics.h"

namespace phonrich {

enum class Feature : unsigned { kRaw = 0, kLns = 1, kCu = 2, kWcu = 3 };
inline constexpr int kNumFeatures = 4;

std::string_view FeatureName(Feature f);

// Subset of {raw, lns, cu, wcu}. Iteration and naming always follow that
// canonical order.
class FeatureSet {
 public:
  constexpr FeatureSet() = default;
  constexpr FeatureSet(std::initializer_list<Feature> features) {
    for (Feature f : features) mask_ |= Bit(f);
  }

  // Comma-separated names, case-insensitive: "raw,lns,cu". "+" is accepted
  // as a separator too. Throws on unknown or empty input.
  static FeatureSet Parse(std::string_view text);

  bool Has(Feature f) const { return (mask_ & Bit(f)) != 0; }
  bool empty() const { return mask_ == 0; }
  int size() const;
  std::vector<Feature> Features() const;
  std::vector<std::string> Names() const;
  // "raw,lns,cu"
  std::string ToString() const;
  // Features beyond the raw score need a QMF record per test utterance.
  bool NeedsQmf() const { return (mask_ & ~Bit(Feature::kRaw)) != 0; }

  bool operator==(const FeatureSet&) const = default;

 private:
  static constexpr unsigned Bit(Feature f) {
    return 1u << static_cast<unsigned>(f);
  }
  unsigned mask_ = 0;
};

struct FeatureVector {
  double raw_score = 0.0;
  double lns = 0.0;  // log net speech, floored at 0.01 s
  double cu = 0.0;
  double wcu = 0.0;
  FeatureSet active;

  // Active values in canonical order.
  std::vector<double> Values() const;
};

// Builds the active features of one trial. `qmf` may be null only when the
// set needs nothing beyond the raw score. Throws on non-finite values or a
// missing WCU.
FeatureVector MakeFeatureVector(const TrialRecord& trial, const QmfRecord* qmf,
                                FeatureSet active);

struct LrOptions {
  bool class_weighting = true;
  int max_iterations = 100;
  double gradient_tolerance = 1e-8;
  double ridge = 1e-9;
};

struct CalibrationModel {
  std::vector<std::string> feature_names;
  std::vector<double> coefficients;
  double intercept = 0.0;
  double target_weight = 1.0;
  double nontarget_weight = 1.0;
  bool converged = false;
  int iterations = 0;
  std::uint64_t seed = 0;
};

// Maximizes the class-weighted mean log-likelihood of
// sigmoid(intercept + coefficients . features) with damped Newton steps from
// zero. With class weighting each class gets weight n_total / (2 n_class).
// On separable data the optimum is at infinity: the fit stops at the
// iteration limit with converged == false and the ordering still correct.
CalibrationModel FitLr(std::span<const FeatureVector> features,
                       std::span<const Label> labels,
                       const LrOptions& options = {});

// Calibrated log-odds, intercept + coefficients . features.
std::vector<double> ApplyLr(const CalibrationModel& model,
                            std::span<const FeatureVector> features);

// Fold index per trial: trials are shuffled with the "folds" substream of
// `seed`, then dealt round-robin within each class. Throws if a class has
// fewer than k trials.
std::vector<int> StratifiedFolds(std::span<const Label> labels, int k,
                                 std::uint64_t seed);

struct CrossValidationResult {
  // Input trials, in input order, with raw_score replaced by the out-of-fold
  // calibrated log-odds.
  std::vector<TrialRecord> calibrated;
  std::vector<CalibrationModel> fold_models;
  std::vector<int> fold_of_trial;
};

CrossValidationResult CrossValidatedCalibration(
    std::span<const TrialRecord> trials, const QmfTable& qmfs,
    FeatureSet features, int k, std::uint64_t seed,
    const LrOptions& options = {});

// Key-value text: feature names, coefficients (17 significant digits),
// intercept, class weights, seed, convergence flag, iteration count.
void WriteCalibrationModel(std::ostream& out, const CalibrationModel& model);
CalibrationModel ReadCalibrationModel(std::istream& in,
                                      const std::string& source = "<stream>");

}  // namespace phonrich

#endif  // PHONRICH_CALIBRATION_H_
