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

#include "phonrich/calibration.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "phonrich/rng.h"

namespace phonrich {

namespace {

constexpr Feature kAllFeatures[] = {Feature::kRaw, Feature::kLns,
                                    Feature::kCu, Feature::kWcu};

// log(1 + exp(a)) without overflow.
double Softplus(double a) {
  return std::max(a, 0.0) + std::log1p(std::exp(-std::abs(a)));
}

double Sigmoid(double a) {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  double e = std::exp(a);
  return e / (1.0 + e);
}

}  // namespace

std::string_view FeatureName(Feature f) {
  switch (f) {
    case Feature::kRaw:
      return "raw";
    case Feature::kLns:
      return "lns";
    case Feature::kCu:
      return "cu";
    case Feature::kWcu:
      return "wcu";
  }
  return "?";
}

FeatureSet FeatureSet::Parse(std::string_view text) {
  FeatureSet set;
  std::string token;
  auto flush = [&]() {
    std::string name;
    for (char c : token) {
      if (!std::isspace(static_cast<unsigned char>(c))) {
        name += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
    }
    token.clear();
    if (name.empty()) return;
    for (Feature f : kAllFeatures) {
      if (name == FeatureName(f)) {
        set.mask_ |= Bit(f);
        return;
      }
    }
    throw std::invalid_argument(fmt::format(
        "unknown calibration feature '{}' (expected raw, lns, cu, wcu)",
        name));
  };
  for (char c : text) {
    if (c == ',' || c == '+') {
      flush();
    } else {
      token += c;
    }
  }
  flush();
  if (set.empty()) {
    throw std::invalid_argument("empty calibration feature set");
  }
  return set;
}

int FeatureSet::size() const { return std::popcount(mask_); }

std::vector<Feature> FeatureSet::Features() const {
  std::vector<Feature> out;
  for (Feature f : kAllFeatures) {
    if (Has(f)) out.push_back(f);
  }
  return out;
}

std::vector<std::string> FeatureSet::Names() const {
  std::vector<std::string> out;
  for (Feature f : Features()) out.emplace_back(FeatureName(f));
  return out;
}

std::string FeatureSet::ToString() const {
  return fmt::format("{}", fmt::join(Names(), ","));
}

std::vector<double> FeatureVector::Values() const {
  std::vector<double> out;
  out.reserve(4);
  for (Feature f : active.Features()) {
    switch (f) {
      case Feature::kRaw:
        out.push_back(raw_score);
        break;
      case Feature::kLns:
        out.push_back(lns);
        break;
      case Feature::kCu:
        out.push_back(cu);
        break;
      case Feature::kWcu:
        out.push_back(wcu);
        break;
    }
  }
  return out;
}

FeatureVector MakeFeatureVector(const TrialRecord& trial, const QmfRecord* qmf,
                                FeatureSet active) {
  FeatureVector fv;
  fv.active = active;
  fv.raw_score = trial.raw_score;
  if (active.NeedsQmf()) {
    if (qmf == nullptr) {
      throw std::invalid_argument(fmt::format(
          "no QMF record for test utterance '{}'", trial.test_id));
    }
    fv.lns = LogNetSpeech(qmf->net_speech);
    fv.cu = qmf->cu;
    if (active.Has(Feature::kWcu)) {
      if (!qmf->wcu) {
        throw std::invalid_argument(fmt::format(
            "QMF record for '{}' has no WCU value", trial.test_id));
      }
      fv.wcu = *qmf->wcu;
    }
  }
  for (double v : fv.Values()) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(fmt::format(
          "non-finite calibration feature for trial {} {}", trial.model_id,
          trial.test_id));
    }
  }
  return fv;
}

CalibrationModel FitLr(std::span<const FeatureVector> features,
                       std::span<const Label> labels,
                       const LrOptions& options) {
  if (features.size() != labels.size()) {
    throw std::invalid_argument("feature and label counts differ");
  }
  if (features.empty()) {
    throw std::invalid_argument("cannot fit calibration on zero trials");
  }
  const FeatureSet active = features.front().active;
  const auto n = static_cast<Eigen::Index>(features.size());
  const Eigen::Index d = active.size() + 1;  // intercept is column 0

  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  std::size_t n_target = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& fv = features[i];
    if (!(fv.active == active)) {
      throw std::invalid_argument("all feature vectors must share one set");
    }
    x(i, 0) = 1.0;
    auto values = fv.Values();
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (!std::isfinite(values[j])) {
        throw std::invalid_argument("non-finite calibration feature");
      }
      x(i, static_cast<Eigen::Index>(j) + 1) = values[j];
    }
    bool is_target = labels[i] == Label::kTarget;
    y(i) = is_target ? 1.0 : 0.0;
    n_target += is_target ? 1 : 0;
  }
  const std::size_t n_nontarget = features.size() - n_target;
  if (n_target == 0 || n_nontarget == 0) {
    throw std::invalid_argument(
        "calibration needs both target and nontarget trials");
  }

  CalibrationModel model;
  model.feature_names = active.Names();
  if (options.class_weighting) {
    const double total = static_cast<double>(features.size());
    model.target_weight = total / (2.0 * static_cast<double>(n_target));
    model.nontarget_weight = total / (2.0 * static_cast<double>(n_nontarget));
  }
  Eigen::VectorXd sw(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sw(i) = y(i) > 0.5 ? model.target_weight : model.nontarget_weight;
  }
  sw /= sw.sum();

  auto objective = [&](const Eigen::VectorXd& theta) {
    Eigen::VectorXd z = x * theta;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      loss += sw(i) * Softplus(y(i) > 0.5 ? -z(i) : z(i));
    }
    return loss;
  };

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
  double loss = objective(theta);
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    Eigen::VectorXd z = x * theta;
    Eigen::VectorXd resid(n);
    Eigen::VectorXd curvature(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double p = Sigmoid(z(i));
      resid(i) = sw(i) * (p - y(i));
      curvature(i) = sw(i) * p * (1.0 - p);
    }
    Eigen::VectorXd grad = x.transpose() * resid;
    if (grad.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      model.converged = true;
      break;
    }
    Eigen::MatrixXd hess = x.transpose() * curvature.asDiagonal() * x;
    hess.diagonal().array() += options.ridge;
    Eigen::VectorXd step = hess.ldlt().solve(grad);
    if (!step.allFinite()) break;

    // Backtracking line search on the Armijo condition.
    const double slope = grad.dot(step);
    double t = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings, t *= 0.5) {
      Eigen::VectorXd candidate = theta - t * step;
      double cand_loss = objective(candidate);
      if (std::isfinite(cand_loss) && cand_loss <= loss - 1e-4 * t * slope) {
        theta = candidate;
        loss = cand_loss;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  model.iterations = iter;
  model.intercept = theta(0);
  model.coefficients.assign(theta.data() + 1, theta.data() + d);
  return model;
}

std::vector<double> ApplyLr(const CalibrationModel& model,
                            std::span<const FeatureVector> features) {
  std::vector<double> out;
  out.reserve(features.size());
  for (const auto& fv : features) {
    if (fv.active.Names() != model.feature_names) {
      throw std::invalid_argument(fmt::format(
          "calibration model expects features [{}], got [{}]",
          fmt::join(model.feature_names, ","), fv.active.ToString()));
    }
    auto values = fv.Values();
    double z = model.intercept;
    for (std::size_t j = 0; j < values.size(); ++j) {
      z += model.coefficients[j] * values[j];
    }
    out.push_back(z);
  }
  return out;
}

std::vector<int> StratifiedFolds(std::span<const Label> labels, int k,
                                 std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("cross-validation needs k >= 2");
  std::size_t n_target = 0;
  for (Label l : labels) n_target += l == Label::kTarget ? 1 : 0;
  const std::size_t n_nontarget = labels.size() - n_target;
  const auto need = static_cast<std::size_t>(k);
  if (n_target < need || n_nontarget < need) {
    throw std::invalid_argument(fmt::format(
        "{} folds need at least {} trials per class, have {} target and {} "
        "nontarget",
        k, k, n_target, n_nontarget));
  }
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = MakeStream(seed, "folds");
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold(labels.size(), 0);
  int next_target = 0;
  int next_nontarget = 0;
  for (std::size_t i : order) {
    int& next = labels[i] == Label::kTarget ? next_target : next_nontarget;
    fold[i] = next;
    next = (next + 1) % k;
  }
  return fold;
}

CrossValidationResult CrossValidatedCalibration(
    std::span<const TrialRecord> trials, const QmfTable& qmfs,
    FeatureSet features, int k, std::uint64_t seed,
    const LrOptions& options) {
  if (features.empty()) {
    throw std::invalid_argument("empty calibration feature set");
  }
  std::vector<FeatureVector> fvs;
  std::vector<Label> labels;
  fvs.reserve(trials.size());
  labels.reserve(trials.size());
  for (const auto& t : trials) {
    const QmfRecord* qmf = nullptr;
    if (features.NeedsQmf()) {
      auto it = qmfs.find(t.test_id);
      if (it == qmfs.end()) {
        throw std::invalid_argument(fmt::format(
            "no QMF record for test utterance '{}'", t.test_id));
      }
      qmf = &it->second;
    }
    fvs.push_back(MakeFeatureVector(t, qmf, features));
    labels.push_back(t.label);
  }

  CrossValidationResult result;
  result.fold_of_trial = StratifiedFolds(labels, k, seed);
  result.calibrated.assign(trials.begin(), trials.end());
  for (int f = 0; f < k; ++f) {
    std::vector<FeatureVector> train_x;
    std::vector<Label> train_y;
    std::vector<std::size_t> held_out;
    std::vector<FeatureVector> test_x;
    for (std::size_t i = 0; i < trials.size(); ++i) {
      if (result.fold_of_trial[i] == f) {
        held_out.push_back(i);
        test_x.push_back(fvs[i]);
      } else {
        train_x.push_back(fvs[i]);
        train_y.push_back(labels[i]);
      }
    }
    CalibrationModel model = FitLr(train_x, train_y, options);
    model.seed = seed;
    auto scores = ApplyLr(model, test_x);
    for (std::size_t j = 0; j < held_out.size(); ++j) {
      result.calibrated[held_out[j]].raw_score = scores[j];
    }
    result.fold_models.push_back(std::move(model));
  }
  return result;
}

void WriteCalibrationModel(std::ostream& out, const CalibrationModel& model) {
  out << "features";
  for (const auto& name : model.feature_names) out << '\t' << name;
  out << "\ncoefficients";
  for (double c : model.coefficients) out << fmt::format("\t{:.17g}", c);
  out << fmt::format("\nintercept\t{:.17g}\n", model.intercept);
  out << fmt::format("class_weights\t{:.17g}\t{:.17g}\n", model.target_weight,
                     model.nontarget_weight);
  out << "seed\t" << model.seed << '\n';
  out << "converged\t" << (model.converged ? 1 : 0) << '\n';
  out << "iterations\t" << model.iterations << '\n';
}

CalibrationModel ReadCalibrationModel(std::istream& in,
                                      const std::string& source) {
  CalibrationModel model;
  std::string line;
  std::size_t line_no = 0;
  unsigned seen = 0;
  auto fail = [&](const std::string& what) {
    return std::runtime_error(fmt::format("{}:{}: {}", source, line_no, what));
  };
  auto parse_double = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw fail("bad number '" + s + "'");
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::istringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    const std::string key = fields.front();
    std::vector<std::string> rest(fields.begin() + 1, fields.end());
    if (key == "features") {
      model.feature_names = rest;
      seen |= 1;
    } else if (key == "coefficients") {
      for (const auto& s : rest) model.coefficients.push_back(parse_double(s));
      seen |= 2;
    } else if (key == "intercept" && rest.size() == 1) {
      model.intercept = parse_double(rest[0]);
      seen |= 4;
    } else if (key == "class_weights" && rest.size() == 2) {
      model.target_weight = parse_double(rest[0]);
      model.nontarget_weight = parse_double(rest[1]);
    } else if (key == "seed" && rest.size() == 1) {
      model.seed = std::stoull(rest[0]);
    } else if (key == "converged" && rest.size() == 1) {
      model.converged = rest[0] == "1";
    } else if (key == "iterations" && rest.size() == 1) {
      model.iterations = std::stoi(rest[0]);
    } else {
      throw fail("unrecognized line '" + line + "'");
    }
  }
  if (seen != 7) {
    throw std::runtime_error(
        source + ": model needs features, coefficients and intercept lines");
  }
  if (model.coefficients.size() != model.feature_names.size()) {
    throw std::runtime_error(source +
                             ": coefficient count differs from feature count");
  }
  return model;
}

}  // namespace phonrich
