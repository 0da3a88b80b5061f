// Copyright 2026 The mldp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MLDP_RANDOM_H_
#define MLDP_RANDOM_H_

#include <cstdint>
#include "absl/strings/string_view.h"

namespace mldp {

// One SplitMix64 step from state x: mixes x + 0x9e3779b97f4a7c15.
uint64_t Mix64(uint64_t x);

// FNV-1a over the bytes of `text`.
uint64_t Fnv1a64(absl::string_view text);

// Deterministic 64-bit generator (xoshiro256**). Seeded through SplitMix64 so
// that nearby seeds give unrelated streams. The output sequence is fixed by
// this implementation and does not depend on the standard library.
class Rng {
 public:
  using result_type = uint64_t;

  explicit Rng(uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~uint64_t{0}; }

  result_type operator()();

  // Uniform double in [0, 1) with 53 random bits.
  double UniformDouble();

  // Uniform integer in [0, bound). `bound` must be positive.
  uint64_t UniformIndex(uint64_t bound);

  // Returns an independent stream labelled by `label`. Derivation depends
  // only on the seed this generator was constructed with and the label, not
  // on how many values have been drawn.
  Rng Derive(absl::string_view label) const;

  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
  uint64_t state_[4];
};

}  // namespace mldp

#endif  // MLDP_RANDOM_H_
