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

#include "phonrich/richness.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "phonrich/nnls.h"

namespace phonrich {

RichnessWeights RichnessWeights::Uniform(double value) {
  RichnessWeights w;
  w.weights.fill(value);
  return w;
}

double WeightedCountUnique(const PresenceVector& p,
                           std::span<const double> weights) {
  if (weights.size() != kInventorySize) {
    throw std::invalid_argument(
        fmt::format("weight vector has {} entries, presence vector has {}",
                    weights.size(), kInventorySize));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < kInventorySize; ++i) {
    if (p.bits.test(i)) sum += weights[i];
  }
  return sum;
}

double WeightedCountUnique(const PresenceVector& p, const RichnessWeights& w) {
  return WeightedCountUnique(p, std::span<const double>(w.weights));
}

RichnessWeights FitWeights(std::span<const WeightTrainingPair> pairs) {
  if (pairs.empty()) {
    throw std::invalid_argument("cannot fit weights on an empty training set");
  }
  std::vector<std::pair<std::string, double>> rows;
  rows.reserve(pairs.size());
  PresenceBits any;
  for (const auto& pair : pairs) {
    if (!std::isfinite(pair.score)) {
      throw std::invalid_argument("training score for '" +
                                  pair.presence.utterance_id +
                                  "' is not finite");
    }
    rows.emplace_back(pair.presence.ToString(), pair.score);
    any |= pair.presence.bits;
  }
  if (any.none()) {
    throw std::invalid_argument(
        "all presence vectors are zero; no weight is identifiable");
  }
  std::sort(rows.begin(), rows.end());

  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(m, kInventorySize);
  Eigen::VectorXd target(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& [bits, score] = rows[r];
    for (std::size_t i = 0; i < kInventorySize; ++i) {
      if (bits[i] == '1') design(r, static_cast<Eigen::Index>(i)) = 1.0;
    }
    target(r) = score;
  }

  NnlsResult nnls = SolveNnls(design, target);
  RichnessWeights w;
  for (std::size_t i = 0; i < kInventorySize; ++i) {
    w.weights[i] = nnls.x(static_cast<Eigen::Index>(i));
  }
  w.fit_residual = nnls.residual_norm / std::sqrt(static_cast<double>(m));
  w.n_train = rows.size();
  return w;
}

std::vector<WeightReportRow> WeightReport(
    const RichnessWeights& w, std::span<const PhonemeTranscription> corpus,
    const PhonemeInventory& inventory) {
  if (corpus.empty()) {
    throw std::invalid_argument("weight report needs a non-empty corpus");
  }
  double total_weight = 0.0;
  for (double v : w.weights) total_weight += v;
  if (!(total_weight > 0.0)) {
    throw std::invalid_argument(
        "weights sum to zero; cannot normalize them to sum to one");
  }
  std::array<std::size_t, kInventorySize> counts{};
  std::size_t tokens = 0;
  for (const auto& trans : corpus) {
    for (const auto& sym : trans.phonemes) {
      auto index = inventory.IndexOf(sym);
      if (!index) {
        throw std::invalid_argument(
            fmt::format("phoneme '{}' in utterance '{}' is not in the "
                        "inventory",
                        sym, trans.utterance_id));
      }
      ++counts[*index];
      ++tokens;
    }
  }
  if (tokens == 0) {
    throw std::invalid_argument("corpus contains no phoneme tokens");
  }
  std::vector<WeightReportRow> rows;
  rows.reserve(kInventorySize);
  for (std::size_t i = 0; i < kInventorySize; ++i) {
    rows.push_back({inventory.Symbol(i), w.weights[i] / total_weight,
                    static_cast<double>(counts[i]) /
                        static_cast<double>(tokens)});
  }
  return rows;
}

void WriteWeights(std::ostream& out, const RichnessWeights& w,
                  const PhonemeInventory& inventory) {
  out << fmt::format("n_train\t{}\tfit_residual\t{:.17g}\n", w.n_train,
                     w.fit_residual);
  for (std::size_t i = 0; i < kInventorySize; ++i) {
    out << fmt::format("{}\t{:.17g}\n", inventory.Symbol(i), w.weights[i]);
  }
}

RichnessWeights ReadWeights(std::istream& in,
                            const PhonemeInventory& inventory,
                            const std::string& source) {
  RichnessWeights w;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t next = 0;
  auto fail = [&](const std::string& what) {
    return std::runtime_error(fmt::format("{}:{}: {}", source, line_no, what));
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    if (!have_header) {
      std::string k1, k2;
      std::size_t n = 0;
      std::string residual;
      if (!(fields >> k1 >> n >> k2 >> residual) || k1 != "n_train" ||
          k2 != "fit_residual") {
        throw fail("expected 'n_train<TAB>N<TAB>fit_residual<TAB>R' header");
      }
      w.n_train = n;
      w.fit_residual = std::stod(residual);
      have_header = true;
      continue;
    }
    std::string sym, value;
    if (!(fields >> sym >> value)) throw fail("expected PHONEME<TAB>weight");
    if (next >= kInventorySize) throw fail("too many weight lines");
    if (sym != inventory.Symbol(next)) {
      throw fail(fmt::format("expected phoneme '{}', found '{}'",
                             inventory.Symbol(next), sym));
    }
    double v = 0.0;
    try {
      v = std::stod(value);
    } catch (const std::exception&) {
      throw fail("bad weight value '" + value + "'");
    }
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw fail("weight must be finite and non-negative");
    }
    w.weights[next++] = v;
  }
  if (!have_header) throw std::runtime_error(source + ": missing header");
  if (next != kInventorySize) {
    throw std::runtime_error(
        fmt::format("{}: expected {} weight lines, found {}", source,
                    kInventorySize, next));
  }
  return w;
}

}  // namespace phonrich
