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

#ifndef PHONRICH_LEXICON_H_
#define PHONRICH_LEXICON_H_

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "phonrich/inventory.h"
#include "phonrich/presence.h"

namespace phonrich {

using Pronunciation = std::vector<std::string>;

// Lowercases ASCII letters and strips non-alphanumeric characters from both
// ends. Internal punctuation (the apostrophe in "don't") is kept. Returns an
// empty string for tokens made only of punctuation.
std::string NormalizeWord(std::string_view token);

// Pronunciation dictionary keyed by normalized word. Immutable after load.
class Lexicon {
 public:
  explicit Lexicon(PhonemeInventory inventory = PhonemeInventory::Arpabet())
      : inventory_(std::move(inventory)) {}

  // Adds a pronunciation after the ones already stored for `word`. Symbols
  // must be stress-free members of the inventory.
  void Add(std::string_view word, Pronunciation pron);

  // First listed pronunciation, or nullptr when the word is out of
  // vocabulary.
  const Pronunciation* Lookup(std::string_view word) const;
  const std::vector<Pronunciation>* Pronunciations(std::string_view word) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const PhonemeInventory& inventory() const { return inventory_; }

 private:
  PhonemeInventory inventory_;
  std::unordered_map<std::string, std::vector<Pronunciation>> entries_;
};

// Parses CMU-dictionary text: "WORD  PH1 PH2 ...", variants as "WORD(2)",
// ";;;" comment lines and trailing "# ..." comments. A single trailing stress
// digit 0-2 is stripped from each symbol. Errors carry `source:line`.
Lexicon ParseLexicon(std::istream& in, const PhonemeInventory& inventory,
                     const std::string& source = "<stream>");
Lexicon LoadLexicon(const std::string& path,
                    const PhonemeInventory& inventory =
                        PhonemeInventory::Arpabet());

struct PhonemeTranscription {
  std::string utterance_id;
  std::vector<std::string> phonemes;
  std::size_t n_words = 0;
  std::size_t oov_words = 0;

  bool operator==(const PhonemeTranscription&) const = default;
};

// Concatenates the first pronunciation of every in-vocabulary token in word
// order. Out-of-vocabulary tokens are counted and contribute nothing.
PhonemeTranscription Transcribe(std::string_view text, const Lexicon& lexicon,
                                std::string utterance_id = {});

// Throws std::invalid_argument if a phoneme is not in the inventory.
PresenceVector MakePresenceVector(const PhonemeTranscription& trans,
                                  const PhonemeInventory& inventory);

}  // namespace phonrich

#endif  // PHONRICH_LEXICON_H_
