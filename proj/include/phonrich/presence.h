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

#ifndef PHONRICH_PRESENCE_H_
#define PHONRICH_PRESENCE_H_

#include <bitset>
#include <string>
#include <string_view>

#include "phonrich/inventory.h"

namespace phonrich {

using PresenceBits = std::bitset<kInventorySize>;

// Binary phoneme-presence indicator of one utterance, aligned to inventory
// order: bit i is set iff inventory symbol i occurs in the utterance.
struct PresenceVector {
  std::string utterance_id;
  PresenceBits bits;

  // 39-character '0'/'1' string, index 0 first.
  std::string ToString() const;
  static PresenceVector FromString(std::string utterance_id,
                                   std::string_view bits);

  bool operator==(const PresenceVector&) const = default;
};

inline PresenceVector operator|(const PresenceVector& a,
                                const PresenceVector& b) {
  return PresenceVector{a.utterance_id, a.bits | b.bits};
}

}  // namespace phonrich

#endif  // PHONRICH_PRESENCE_H_
