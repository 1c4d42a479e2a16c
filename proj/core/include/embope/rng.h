// Copyright 2026 The embope Authors
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

#ifndef EMBOPE_RNG_H_
#define EMBOPE_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace embope {

// One independent pseudo-random stream. Wraps a 64-bit Mersenne Twister whose
// output sequence is fixed by the C++ standard.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::mt19937_64& engine() { return engine_; }

  // Uniform on [0, 1) with 53 bits of resolution.
  double NextUniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// Master seed plus deterministic stream derivation keyed by (label, index).
// Streams never share state, so the order in which they are drawn from does
// not matter: a run evaluated on any worker sees the same numbers.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t master_seed) : master_(master_seed) {}

  std::uint64_t master_seed() const { return master_; }

  std::uint64_t Derive(std::string_view label, std::uint64_t index = 0) const;
  RngStream Stream(std::string_view label, std::uint64_t index = 0) const {
    return RngStream(Derive(label, index));
  }
  // A new SeededRng rooted at a derived seed, for hierarchical keys such as
  // (cell, run).
  SeededRng Child(std::string_view label, std::uint64_t index = 0) const {
    return SeededRng(Derive(label, index));
  }

 private:
  std::uint64_t master_;
};

std::uint64_t SplitMix64(std::uint64_t x);

}  // namespace embope

#endif  // EMBOPE_RNG_H_
