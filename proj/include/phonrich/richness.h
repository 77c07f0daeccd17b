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

#ifndef PHONRICH_RICHNESS_H_
#define PHONRICH_RICHNESS_H_

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "phonrich/inventory.h"
#include "phonrich/lexicon.h"
#include "phonrich/presence.h"

namespace phonrich {

// Non-negative per-phoneme contributions to the speaker-match score.
struct RichnessWeights {
  std::array<double, kInventorySize> weights{};
  // Root-mean-square residual of the fit over the training pairs.
  double fit_residual = 0.0;
  std::size_t n_train = 0;

  static RichnessWeights Uniform(double value = 1.0);
};

// A positive-trial training example: presence of the test utterance and the
// score it got against its own speaker's enrollment.
struct WeightTrainingPair {
  PresenceVector presence;
  double score = 0.0;
};

// Count of distinct phonemes (CU), in [0, kInventorySize].
inline int CountUnique(const PresenceVector& p) {
  return static_cast<int>(p.bits.count());
}

// Weighted count of distinct phonemes (WCU): w . p.
double WeightedCountUnique(const PresenceVector& p, const RichnessWeights& w);
// Raw-vector overload; throws std::invalid_argument on length mismatch.
double WeightedCountUnique(const PresenceVector& p,
                           std::span<const double> weights);

// Non-negative least squares with no intercept:
//   argmin_{w >= 0} sum_u (w . p_u - score_u)^2.
// Pairs are put in a canonical order before solving, so the result does not
// depend on input order. Throws on an empty set or an all-zero design.
RichnessWeights FitWeights(std::span<const WeightTrainingPair> pairs);

struct WeightReportRow {
  std::string phoneme;
  double normalized_weight = 0.0;
  // Occurrences of the phoneme over all phoneme tokens in the corpus.
  double frequency = 0.0;
};

// Rows in inventory order. Weights are scaled to sum to one.
std::vector<WeightReportRow> WeightReport(
    const RichnessWeights& w, std::span<const PhonemeTranscription> corpus,
    const PhonemeInventory& inventory = PhonemeInventory::Arpabet());

// Text format: '#' comment lines, then
//   n_train<TAB>N<TAB>fit_residual<TAB>R
// and one PHONEME<TAB>weight line per inventory symbol, in inventory order.
// Reals are written with 17 significant digits so they read back exactly.
void WriteWeights(std::ostream& out, const RichnessWeights& w,
                  const PhonemeInventory& inventory =
                      PhonemeInventory::Arpabet());
RichnessWeights ReadWeights(std::istream& in,
                            const PhonemeInventory& inventory =
                                PhonemeInventory::Arpabet(),
                            const std::string& source = "<stream>");

}  // namespace phonrich

#endif  // PHONRICH_RICHNESS_H_
