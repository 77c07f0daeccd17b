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

#ifndef PHONRICH_INVENTORY_H_
#define PHONRICH_INVENTORY_H_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace phonrich {

// Number of stress-free ARPABET phonemes. Every presence vector and weight
// vector in the toolkit has exactly this many axes.
inline constexpr std::size_t kInventorySize = 39;

// Ordered phoneme alphabet. Symbols are uppercase, unique and sorted, so the
// index of a symbol is stable across runs and across inventory files that
// list the same set in a different order.
class PhonemeInventory {
 public:
  // The 39-symbol CMU dictionary set.
  static const PhonemeInventory& Arpabet();

  // One symbol per line; blank lines and '#' comments are ignored. The file
  // must name exactly kInventorySize distinct symbols.
  static PhonemeInventory FromFile(const std::string& path);

  explicit PhonemeInventory(std::vector<std::string> symbols);

  std::size_t size() const { return symbols_.size(); }
  const std::string& Symbol(std::size_t index) const {
    return symbols_[index];
  }
  const std::vector<std::string>& symbols() const { return symbols_; }

  std::optional<std::size_t> IndexOf(std::string_view symbol) const;
  bool Contains(std::string_view symbol) const {
    return IndexOf(symbol).has_value();
  }

  bool operator==(const PhonemeInventory& other) const {
    return symbols_ == other.symbols_;
  }

 private:
  std::vector<std::string> symbols_;
};

}  // namespace phonrich

#endif  // PHONRICH_INVENTORY_H_
