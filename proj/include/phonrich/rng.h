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

#ifndef PHONRICH_RNG_H_
#define PHONRICH_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace phonrich {

using Rng = std::mt19937_64;

// Independent generator for the named substream of a run seed. Every random
// decision in the toolkit draws from one of these, e.g.
// MakeStream(seed, "folds") or MakeStream(seed, "sim/test", test_id).
Rng MakeStream(std::uint64_t seed, std::string_view name,
               std::string_view key = {});

// Uniform integer in [lo, hi].
inline std::int64_t UniformInt(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

}  // namespace phonrich

#endif  // PHONRICH_RNG_H_
