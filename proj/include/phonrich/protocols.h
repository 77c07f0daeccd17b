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

#ifndef PHONRICH_PROTOCOLS_H_
#define PHONRICH_PROTOCOLS_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phonrich/io.h"
#include "phonrich/lexicon.h"

namespace phonrich {

enum class UtteranceKind { kSentence, kWord, kDigit, kFree };

std::string_view UtteranceKindName(UtteranceKind kind);
UtteranceKind ParseUtteranceKind(std::string_view text);

// One recording of the source corpus.
struct UtteranceRecord {
  std::string utterance_id;
  std::string speaker_id;
  std::string gender;  // empty when unknown
  UtteranceKind kind = UtteranceKind::kFree;
  std::string word_text;  // word and digit kinds
  int repetition_index = 1;
  double net_speech = 0.0;
  std::string transcript;
  // Per-token durations of `transcript`, needed for clipping.
  std::vector<double> word_durations;
};

// Inventory JSONL: one UtteranceRecord per line with keys utterance_id,
// speaker_id, gender, kind, word_text, repetition_index, net_speech,
// transcript, word_durations. Validates net_speech > 0,
// repetition_index >= 1, unique utterance ids and unique
// (speaker, word, repetition) recordings.
std::vector<UtteranceRecord> ReadUtteranceInventory(
    std::istream& in, const std::string& source = "<stream>");
void WriteUtteranceInventory(std::ostream& out,
                             std::span<const UtteranceRecord> utterances,
                             const Provenance* provenance = nullptr);

struct TrialPair {
  std::string model_id;
  std::string test_id;

  bool operator==(const TrialPair&) const = default;
  auto operator<=>(const TrialPair&) const = default;
};

struct EnrollmentModel {
  std::string model_id;
  std::string speaker_id;
  std::string gender;
  std::vector<std::string> utterance_ids;
  double net_speech = 0.0;
  std::string transcript;

  bool operator==(const EnrollmentModel&) const = default;
};

// A synthesized test probe.
struct TestProbe {
  std::string test_id;
  std::string speaker_id;
  std::string gender;
  // Source recordings in playback order.
  std::vector<std::string> source_ids;
  std::string transcript;
  double net_speech = 0.0;
  // Clip protocols: target clip duration and the chosen window as
  // [start word, start word + word count) over the (repeated) word sequence.
  std::optional<double> clip_target;
  std::size_t clip_start_word = 0;
  std::size_t clip_word_count = 0;

  bool operator==(const TestProbe&) const = default;
};

struct ProtocolSpec {
  std::string name;
  std::vector<EnrollmentModel> models;
  std::vector<TestProbe> tests;
  std::vector<TrialPair> positive_trials;
  std::vector<TrialPair> negative_trials;

  bool operator==(const ProtocolSpec&) const = default;
};

// One model per speaker from that speaker's sentence recordings. Every
// speaker present in `utterances` must have at least one sentence.
std::vector<EnrollmentModel> BuildEnrollment(
    std::span<const UtteranceRecord> utterances);

struct ClipOptions {
  std::string name = "clip";
  // Base trial lists to pass through; test ids refer to base utterances.
  std::vector<TrialPair> positive_trials;
  std::vector<TrialPair> negative_trials;
  // Enrollment models to carry into the spec.
  std::vector<EnrollmentModel> models;
  // When set, clips whose words are all out of vocabulary are discarded
  // along with their trials.
  const Lexicon* lexicon = nullptr;
};

// Tolerance on summed word durations when comparing against a clip target.
inline constexpr double kDurationEpsilon = 1e-9;

// One clip per base test. A clip is a contiguous run of words starting at a
// word boundary chosen uniformly among the starts whose run reaches
// `target_seconds`; words are added until the summed duration reaches the
// target. Utterances shorter than the target are repeated end to end first.
ProtocolSpec BuildClipProtocol(std::span<const UtteranceRecord> tests,
                               double target_seconds, std::uint64_t seed,
                               const ClipOptions& options = {});

struct RepetitiveOptions {
  std::string name = "repetitive";
  int probes_per_speaker = 160;
  int min_words = 2;
  int max_words = 10;
  int max_unique_words = 10;
  int max_retries = 100;
  // Cap on negative trials; 0 keeps every matching-gender impostor pair.
  std::size_t max_negative_trials = 0;
};

// Probes made of T concatenated single-word recordings with U distinct word
// types: T ~ U{min_words..max_words}, U ~ U{1..min(max_unique_words, T)}.
// Each slot uses a different recording of its word type. Models come from
// BuildEnrollment; negatives pair each probe with every other speaker of the
// same gender (all speakers when gender is unknown).
ProtocolSpec BuildRepetitiveProtocol(std::span<const UtteranceRecord> utterances,
                                     std::uint64_t seed,
                                     const RepetitiveOptions& options = {});

// Output files of EmitProtocol.
struct ProtocolPaths {
  std::string trials;  // <prefix>.trials.tsv
  std::string tests;   // <prefix>.tests.jsonl
  std::string models;  // <prefix>.models.jsonl

  static ProtocolPaths FromPrefix(const std::string& prefix);
};

// Trial TSV `model_id<TAB>test_id<TAB>label` (positives first), test manifest
// JSONL and model manifest JSONL. Output is a pure function of the spec and
// the provenance header.
void EmitProtocol(const ProtocolSpec& spec, const ProtocolPaths& paths,
                  const Provenance* provenance = nullptr);
void WriteTrialList(std::ostream& out, const ProtocolSpec& spec,
                    const Provenance* provenance = nullptr);
void WriteTestManifest(std::ostream& out, const ProtocolSpec& spec,
                       const Provenance* provenance = nullptr);
void WriteModelManifest(std::ostream& out, const ProtocolSpec& spec,
                        const Provenance* provenance = nullptr);

ProtocolSpec ReadProtocol(const ProtocolPaths& paths);

// Trial TSV with three (model, test, label) or four (plus score) columns.
void ReadTrialList(std::istream& in, const std::string& source,
                   std::vector<TrialPair>& positive,
                   std::vector<TrialPair>& negative);

}  // namespace phonrich

#endif  // PHONRICH_PROTOCOLS_H_
