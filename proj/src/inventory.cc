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

#include "phonrich/inventory.h"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace phonrich {

const PhonemeInventory& PhonemeInventory::Arpabet() {
  static const PhonemeInventory kArpabet({
      "AA", "AE", "AH", "AO", "AW", "AY", "B",  "CH", "D",  "DH",
      "EH", "ER", "EY", "F",  "G",  "HH", "IH", "IY", "JH", "K",
      "L",  "M",  "N",  "NG", "OW", "OY", "P",  "R",  "S",  "SH",
      "T",  "TH", "UH", "UW", "V",  "W",  "Y",  "Z",  "ZH"});
  return kArpabet;
}

PhonemeInventory::PhonemeInventory(std::vector<std::string> symbols)
    : symbols_(std::move(symbols)) {
  if (symbols_.size() != kInventorySize) {
    throw std::invalid_argument(
        fmt::format("phoneme inventory must have {} symbols, got {}",
                    kInventorySize, symbols_.size()));
  }
  std::sort(symbols_.begin(), symbols_.end());
  auto dup = std::adjacent_find(symbols_.begin(), symbols_.end());
  if (dup != symbols_.end()) {
    throw std::invalid_argument(
        fmt::format("duplicate phoneme symbol '{}' in inventory", *dup));
  }
  for (const auto& s : symbols_) {
    if (s.empty() ||
        std::any_of(s.begin(), s.end(), [](char c) {
          return !(c >= 'A' && c <= 'Z');
        })) {
      throw std::invalid_argument(
          fmt::format("invalid phoneme symbol '{}' (uppercase letters only)",
                      s));
    }
  }
}

PhonemeInventory PhonemeInventory::FromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open inventory file " + path);
  std::vector<std::string> symbols;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    symbols.push_back(line.substr(first, last - first + 1));
  }
  return PhonemeInventory(std::move(symbols));
}

std::optional<std::size_t> PhonemeInventory::IndexOf(
    std::string_view symbol) const {
  auto it = std::lower_bound(symbols_.begin(), symbols_.end(), symbol);
  if (it == symbols_.end() || *it != symbol) return std::nullopt;
  return static_cast<std::size_t>(it - symbols_.begin());
}

}  // namespace phonrich
