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

#ifndef PHONRICH_SIMULATOR_H_
#define PHONRICH_SIMULATOR_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "phonrich/lexicon.h"
#include "phonrich/metrics.h"
#include "phonrich/protocols.h"
#include "phonrich/richness.h"

namespace phonrich {

// A word and its CMU-style pronunciation (stress digits allowed).
struct VocabularyEntry {
  std::string word;
  std::string pronunciation;
};

// 66 common English words whose pronunciations together cover all 39
// phonemes.
const std::vector<VocabularyEntry>& DefaultVocabulary();

Lexicon MakeVocabularyLexicon(std::span<const VocabularyEntry> vocabulary);

// Synthetic speakers whose test embeddings scatter more when the test
// utterance has fewer distinct phonemes. Test noise has total scale
// sigma(CU) = sigma0 * (1 + kappa * (39 - CU) / 39); enrollment noise has
// scale sigma0 / 4. Noise is isotropic Gaussian with per-axis standard
// deviation sigma / sqrt(dim), so its expected norm is about sigma.
struct SimConfig {
  int n_speakers = 50;
  int dim = 32;
  double sigma0 = 0.6;
  double kappa = 2.0;
  std::uint64_t seed = 0;
  std::vector<VocabularyEntry> vocabulary = DefaultVocabulary();
  // Corpus synthesis: recordings per word type and enrollment sentences per
  // speaker.
  int repetitions = 10;
  int sentences_per_speaker = 5;

  // Throws std::invalid_argument when a field is out of range.
  void Validate() const;
};

// Speakers spk000, spk001, ... alternating gender f/m. Every speaker records
// each vocabulary word `repetitions` times (word kind) and reads the whole
// vocabulary split over `sentences_per_speaker` sentences. Word durations
// grow with phoneme count and vary per recording.
std::vector<UtteranceRecord> SynthesizeCorpus(const SimConfig& config);

struct Embedding {
  std::string utterance_id;
  std::vector<double> vector;  // unit norm
};

// Dot product of unit vectors, in [-1, 1]. Throws on dimension mismatch.
double CosineScore(const Embedding& a, const Embedding& b);

struct SimulationResult {
  std::vector<Embedding> model_embeddings;
  std::vector<Embedding> test_embeddings;
  // Positive trials first, then negative, in protocol order.
  std::vector<TrialRecord> trials;
  // Per test probe: net speech, CU and, when weights are given, WCU.
  QmfTable qmfs;
};

// Draws one mean direction per speaker, embeds every model and test of the
// protocol and scores its trials by cosine similarity. Each speaker, model
// and test uses its own seed-derived random stream, so results do not depend
// on generation order.
SimulationResult SimulateCorpus(const SimConfig& config,
                                const ProtocolSpec& protocol,
                                const Lexicon& lexicon,
                                const RichnessWeights* weights = nullptr);

}  // namespace phonrich

#endif  // PHONRICH_SIMULATOR_H_
