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

#include "phonrich/lexicon.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace phonrich {

namespace {

bool IsAlnum(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

// "WORD(2)" -> "WORD"; anything else is returned unchanged.
std::string_view StripVariantSuffix(std::string_view word) {
  if (word.size() < 3 || word.back() != ')') return word;
  auto open = word.rfind('(');
  if (open == std::string_view::npos || open == 0 ||
      open + 2 > word.size() - 1) {
    return word;
  }
  auto digits = word.substr(open + 1, word.size() - open - 2);
  bool all_digits = std::all_of(digits.begin(), digits.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  });
  return all_digits ? word.substr(0, open) : word;
}

}  // namespace

std::string NormalizeWord(std::string_view token) {
  std::size_t begin = 0;
  std::size_t end = token.size();
  while (begin < end && !IsAlnum(token[begin])) ++begin;
  while (end > begin && !IsAlnum(token[end - 1])) --end;
  std::string out(token.substr(begin, end - begin));
  for (auto& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

void Lexicon::Add(std::string_view word, Pronunciation pron) {
  std::string key = NormalizeWord(word);
  if (key.empty()) {
    throw std::invalid_argument(
        fmt::format("lexicon word '{}' has no alphanumeric characters", word));
  }
  for (const auto& sym : pron) {
    if (!inventory_.Contains(sym)) {
      throw std::invalid_argument(fmt::format(
          "phoneme '{}' of word '{}' is not in the inventory", sym, word));
    }
  }
  entries_[key].push_back(std::move(pron));
}

const std::vector<Pronunciation>* Lexicon::Pronunciations(
    std::string_view word) const {
  auto it = entries_.find(NormalizeWord(word));
  return it == entries_.end() ? nullptr : &it->second;
}

const Pronunciation* Lexicon::Lookup(std::string_view word) const {
  const auto* prons = Pronunciations(word);
  return prons == nullptr ? nullptr : &prons->front();
}

Lexicon ParseLexicon(std::istream& in, const PhonemeInventory& inventory,
                     const std::string& source) {
  Lexicon lexicon(inventory);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind(";;;", 0) == 0) continue;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    Pronunciation pron;
    std::string sym;
    while (fields >> sym) {
      for (auto& c : sym) {
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      }
      if (sym.size() > 1 && sym.back() >= '0' && sym.back() <= '2') {
        sym.pop_back();
      }
      if (!inventory.Contains(sym)) {
        throw std::runtime_error(
            fmt::format("{}:{}: symbol '{}' is not in the phoneme inventory",
                        source, line_no, sym));
      }
      pron.push_back(std::move(sym));
    }
    if (pron.empty()) {
      throw std::runtime_error(fmt::format(
          "{}:{}: malformed entry '{}' (no pronunciation)", source, line_no,
          word));
    }
    auto base = StripVariantSuffix(word);
    if (NormalizeWord(base).empty()) {
      throw std::runtime_error(fmt::format(
          "{}:{}: malformed entry (word '{}' has no alphanumeric characters)",
          source, line_no, word));
    }
    lexicon.Add(base, std::move(pron));
  }
  if (in.bad()) {
    throw std::runtime_error(fmt::format("{}: read error", source));
  }
  return lexicon;
}

Lexicon LoadLexicon(const std::string& path,
                    const PhonemeInventory& inventory) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open lexicon file " + path);
  return ParseLexicon(in, inventory, path);
}

PhonemeTranscription Transcribe(std::string_view text, const Lexicon& lexicon,
                                std::string utterance_id) {
  PhonemeTranscription out;
  out.utterance_id = std::move(utterance_id);
  std::istringstream tokens{std::string(text)};
  std::string token;
  while (tokens >> token) {
    std::string word = NormalizeWord(token);
    if (word.empty()) continue;
    ++out.n_words;
    const Pronunciation* pron = lexicon.Lookup(word);
    if (pron == nullptr) {
      ++out.oov_words;
      continue;
    }
    out.phonemes.insert(out.phonemes.end(), pron->begin(), pron->end());
  }
  return out;
}

PresenceVector MakePresenceVector(const PhonemeTranscription& trans,
                                  const PhonemeInventory& inventory) {
  PresenceVector p{trans.utterance_id, {}};
  for (const auto& sym : trans.phonemes) {
    auto index = inventory.IndexOf(sym);
    if (!index) {
      throw std::invalid_argument(
          fmt::format("phoneme '{}' is not in the inventory", sym));
    }
    p.bits.set(*index);
  }
  return p;
}

std::string PresenceVector::ToString() const {
  std::string s(kInventorySize, '0');
  for (std::size_t i = 0; i < kInventorySize; ++i) {
    if (bits.test(i)) s[i] = '1';
  }
  return s;
}

PresenceVector PresenceVector::FromString(std::string utterance_id,
                                          std::string_view bits) {
  if (bits.size() != kInventorySize) {
    throw std::invalid_argument(
        fmt::format("presence string must have {} characters, got {}",
                    kInventorySize, bits.size()));
  }
  PresenceVector p{std::move(utterance_id), {}};
  for (std::size_t i = 0; i < kInventorySize; ++i) {
    if (bits[i] == '1') {
      p.bits.set(i);
    } else if (bits[i] != '0') {
      throw std::invalid_argument("presence string must contain only 0/1");
    }
  }
  return p;
}

}  // namespace phonrich
