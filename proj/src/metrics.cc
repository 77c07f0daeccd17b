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

#include "phonrich/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace phonrich {

std::string_view LabelName(Label label) {
  return label == Label::kTarget ? "target" : "nontarget";
}

Label ParseLabel(std::string_view text) {
  if (text == "target" || text == "1") return Label::kTarget;
  if (text == "nontarget" || text == "0") return Label::kNontarget;
  throw std::invalid_argument(fmt::format("unknown trial label '{}'", text));
}

ScoreSets SplitByLabel(std::span<const TrialRecord> trials) {
  ScoreSets sets;
  for (const auto& t : trials) {
    if (!std::isfinite(t.raw_score)) {
      throw std::invalid_argument(fmt::format(
          "trial {} {} has a non-finite score", t.model_id, t.test_id));
    }
    (t.label == Label::kTarget ? sets.target : sets.nontarget)
        .push_back(t.raw_score);
  }
  return sets;
}

namespace {

void RequireBothClasses(std::span<const double> target,
                        std::span<const double> nontarget) {
  if (target.empty() || nontarget.empty()) {
    throw std::invalid_argument(
        "need at least one target and one nontarget trial");
  }
}

// One point of the threshold sweep.
struct OperatingPoint {
  double threshold;  // +inf for the accept-nothing point
  double far;
  double frr;
};

// Operating points at every distinct score, ascending, plus the
// accept-nothing point.
std::vector<OperatingPoint> Sweep(std::span<const double> target,
                                  std::span<const double> nontarget) {
  RequireBothClasses(target, nontarget);
  std::vector<double> tgt(target.begin(), target.end());
  std::vector<double> non(nontarget.begin(), nontarget.end());
  std::sort(tgt.begin(), tgt.end());
  std::sort(non.begin(), non.end());
  const double n_tgt = static_cast<double>(tgt.size());
  const double n_non = static_cast<double>(non.size());

  std::vector<OperatingPoint> points;
  points.reserve(tgt.size() + non.size() + 1);
  std::size_t ti = 0;  // targets below the threshold
  std::size_t ni = 0;  // nontargets below the threshold
  while (ti < tgt.size() || ni < non.size()) {
    double t = std::numeric_limits<double>::infinity();
    if (ti < tgt.size()) t = tgt[ti];
    if (ni < non.size()) t = std::min(t, non[ni]);
    points.push_back({t, static_cast<double>(non.size() - ni) / n_non,
                      static_cast<double>(ti) / n_tgt});
    while (ti < tgt.size() && tgt[ti] == t) ++ti;
    while (ni < non.size() && non[ni] == t) ++ni;
  }
  points.push_back({std::numeric_limits<double>::infinity(), 0.0, 1.0});
  return points;
}

}  // namespace

EerResult ComputeEer(std::span<const double> target,
                     std::span<const double> nontarget) {
  auto points = Sweep(target, nontarget);
  // FAR - FRR is 1 at the first point and -1 at the last.
  for (std::size_t k = 1; k < points.size(); ++k) {
    const auto& cur = points[k];
    double d = cur.far - cur.frr;
    if (d > 0.0) continue;
    if (d == 0.0) return {cur.far, cur.threshold};
    const auto& prev = points[k - 1];
    double d_prev = prev.far - prev.frr;
    double alpha = d_prev / (d_prev - d);
    double eer = prev.far + alpha * (cur.far - prev.far);
    double threshold =
        std::isfinite(cur.threshold)
            ? prev.threshold + alpha * (cur.threshold - prev.threshold)
            : prev.threshold;
    return {eer, threshold};
  }
  // Unreachable: the last point always has FAR - FRR = -1.
  return {0.5, points.back().threshold};
}

EerResult ComputeEer(std::span<const TrialRecord> trials) {
  auto sets = SplitByLabel(trials);
  return ComputeEer(sets.target, sets.nontarget);
}

double ComputeMinDcf(std::span<const double> target,
                     std::span<const double> nontarget, double p_target) {
  if (!(p_target > 0.0 && p_target < 1.0)) {
    throw std::invalid_argument("target prior must be in (0, 1)");
  }
  auto points = Sweep(target, nontarget);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& pt : points) {
    best = std::min(best, p_target * pt.frr + (1.0 - p_target) * pt.far);
  }
  return best / std::min(p_target, 1.0 - p_target);
}

double ComputeMinCPrimary(std::span<const double> target,
                          std::span<const double> nontarget) {
  double sum = 0.0;
  for (double p : kPrimaryTargetPriors) {
    sum += ComputeMinDcf(target, nontarget, p);
  }
  return sum / static_cast<double>(kPrimaryTargetPriors.size());
}

double ComputeMinCPrimary(std::span<const TrialRecord> trials) {
  auto sets = SplitByLabel(trials);
  return ComputeMinCPrimary(sets.target, sets.nontarget);
}

MetricsReport Evaluate(std::span<const TrialRecord> trials) {
  auto sets = SplitByLabel(trials);
  auto eer = ComputeEer(sets.target, sets.nontarget);
  MetricsReport report;
  report.eer = eer.eer;
  report.threshold_at_eer = eer.threshold;
  report.min_c_primary = ComputeMinCPrimary(sets.target, sets.nontarget);
  report.n_target = sets.target.size();
  report.n_nontarget = sets.nontarget.size();
  return report;
}

namespace {

// Sum of t(t-1)/2 over runs of equal adjacent values.
template <typename Eq>
std::int64_t TiedPairs(std::size_t n, Eq&& equal_to_prev) {
  std::int64_t pairs = 0;
  std::int64_t run = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (equal_to_prev(i)) {
      ++run;
    } else {
      pairs += run * (run - 1) / 2;
      run = 1;
    }
  }
  return pairs + run * (run - 1) / 2;
}

// Stable merge sort of `v` counting pairs i < j with v[i] > v[j].
std::int64_t CountInversions(std::vector<double>& v) {
  std::vector<double> buf(v.size());
  std::int64_t swaps = 0;
  for (std::size_t width = 1; width < v.size(); width *= 2) {
    for (std::size_t lo = 0; lo < v.size(); lo += 2 * width) {
      std::size_t mid = std::min(lo + width, v.size());
      std::size_t hi = std::min(lo + 2 * width, v.size());
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          swaps += static_cast<std::int64_t>(mid - i);
          buf[k++] = v[j++];
        } else {
          buf[k++] = v[i++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
    }
    v.swap(buf);
  }
  return swaps;
}

}  // namespace

double KendallTau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument(fmt::format(
        "Kendall tau: length mismatch ({} vs {})", x.size(), y.size()));
  }
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("Kendall tau needs at least 2 pairs");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw std::invalid_argument("Kendall tau: non-finite value");
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }
  const std::int64_t n0 = static_cast<std::int64_t>(n) *
                          static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t tied_x =
      TiedPairs(n, [&](std::size_t i) { return xs[i] == xs[i - 1]; });
  const std::int64_t tied_xy = TiedPairs(n, [&](std::size_t i) {
    return xs[i] == xs[i - 1] && ys[i] == ys[i - 1];
  });
  const std::int64_t swaps = CountInversions(ys);
  const std::int64_t tied_y =
      TiedPairs(n, [&](std::size_t i) { return ys[i] == ys[i - 1]; });
  if (tied_x == n0 || tied_y == n0) {
    throw std::invalid_argument(
        "Kendall tau-b undefined: all values tied in one list");
  }
  const std::int64_t numerator = n0 - tied_x - tied_y + tied_xy - 2 * swaps;
  return static_cast<double>(numerator) /
         std::sqrt(static_cast<double>(n0 - tied_x) *
                   static_cast<double>(n0 - tied_y));
}

double LogNetSpeech(double net_speech) {
  return std::log(std::max(net_speech, 0.01));
}

CorrelationReport MakeCorrelationReport(std::span<const TrialRecord> trials,
                                        const QmfTable& qmfs) {
  CorrelationReport report;
  bool have_wcu = true;
  std::vector<const QmfRecord*> rec(trials.size());
  for (std::size_t i = 0; i < trials.size(); ++i) {
    auto it = qmfs.find(trials[i].test_id);
    if (it == qmfs.end()) {
      throw std::invalid_argument(fmt::format(
          "no QMF record for test utterance '{}'", trials[i].test_id));
    }
    rec[i] = &it->second;
    if (!it->second.wcu) have_wcu = false;
  }

  struct Measure {
    const char* name;
    double (*value)(const QmfRecord&);
  };
  std::vector<Measure> measures = {
      {"CU", [](const QmfRecord& q) { return q.cu; }}};
  if (have_wcu) {
    measures.push_back({"WCU", [](const QmfRecord& q) { return *q.wcu; }});
  }
  measures.push_back(
      {"LNS", [](const QmfRecord& q) { return LogNetSpeech(q.net_speech); }});

  for (Label label : {Label::kTarget, Label::kNontarget}) {
    for (const auto& m : measures) {
      std::vector<double> qv, sv;
      for (std::size_t i = 0; i < trials.size(); ++i) {
        if (trials[i].label != label) continue;
        qv.push_back(m.value(*rec[i]));
        sv.push_back(trials[i].raw_score);
      }
      if (qv.size() < 2) {
        throw std::invalid_argument(
            fmt::format("correlation report needs at least two {} trials",
                        LabelName(label)));
      }
      double tau = 0.0;
      try {
        tau = KendallTau(qv, sv);
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(fmt::format(
            "{} vs score ({} trials): {}", m.name, LabelName(label),
            e.what()));
      }
      report.rows.push_back({label, m.name, qv.size(), tau});
    }
  }
  for (std::size_t i = 0; i < trials.size(); ++i) {
    for (const auto& m : measures) {
      report.scatter.push_back({trials[i].test_id, m.name, m.value(*rec[i]),
                                trials[i].raw_score, trials[i].label});
    }
  }
  return report;
}

ProtocolStats ComputeProtocolStats(std::span<const UtteranceQuality> utts) {
  if (utts.empty()) {
    throw std::invalid_argument("protocol statistics need at least one "
                                "utterance");
  }
  const double n = static_cast<double>(utts.size());
  ProtocolStats s;
  s.n = utts.size();
  for (const auto& u : utts) {
    s.net_speech_mean += u.net_speech;
    s.cu_mean += u.cu;
  }
  s.net_speech_mean /= n;
  s.cu_mean /= n;
  for (const auto& u : utts) {
    s.net_speech_std += (u.net_speech - s.net_speech_mean) *
                        (u.net_speech - s.net_speech_mean);
    s.cu_std += (u.cu - s.cu_mean) * (u.cu - s.cu_mean);
  }
  s.net_speech_std = std::sqrt(s.net_speech_std / n);
  s.cu_std = std::sqrt(s.cu_std / n);
  return s;
}

}  // namespace phonrich
