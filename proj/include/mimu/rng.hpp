// Copyright 2026 The mimu Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <initializer_list>

namespace mimu {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based child seed: depends only on the parent and the counters,
/// never on evaluation order.
inline std::uint64_t derive_seed(std::uint64_t parent,
                                 std::initializer_list<std::uint64_t> counters) {
  std::uint64_t h = splitmix64(parent);
  for (const std::uint64_t c : counters) {
    h = splitmix64(h ^ splitmix64(c + 0x632BE59BD9B4E019ULL));
  }
  return h;
}

}  // namespace mimu
