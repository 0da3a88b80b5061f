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

#include "mldp/random.h"

namespace mldp {

uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t Fnv1a64(absl::string_view text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

inline uint64_t Rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(uint64_t seed) : seed_(seed) {
  // Consecutive SplitMix64 outputs.
  uint64_t s = seed;
  for (uint64_t& word : state_) {
    word = Mix64(s);
    s += 0x9e3779b97f4a7c15ULL;
  }
}

Rng::result_type Rng::operator()() {
  const uint64_t result = Rotl(state_[1] * 5, 7) * 9;
  const uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = Rotl(state_[3], 45);
  return result;
}

double Rng::UniformDouble() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

uint64_t Rng::UniformIndex(uint64_t bound) {
  // Rejection on the top of the range keeps the result exactly uniform.
  const uint64_t limit = max() - max() % bound;
  uint64_t draw;
  do {
    draw = (*this)();
  } while (draw >= limit);
  return draw % bound;
}

Rng Rng::Derive(absl::string_view label) const {
  return Rng(Mix64(seed_ ^ Mix64(Fnv1a64(label))));
}

}  // namespace mldp
