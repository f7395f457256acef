// Copyright 2026 The Fairgram Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace fairgram {

// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream tags keep RAND, PROB, group and augmentation draws apart.
enum class Stream : std::uint64_t {
  kRand = 1,
  kProb = 2,
  kGroup = 3,
  kAugment = 4,
  kMutation = 5,
};

// Seeded random stream with platform-independent draws. The standard
// distributions are implementation-defined, so the few we need are spelled
// out here to keep campaigns byte-reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  // Stream for one unit of work, e.g. iteration `index` of a phase. Only
  // depends on its inputs, so work items can run in any order.
  static Rng derive(std::uint64_t seed, Stream stream, std::uint64_t index) {
    const std::uint64_t s = mix64(seed ^ mix64(static_cast<std::uint64_t>(stream)));
    return Rng(mix64(s ^ mix64(index + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return static_cast<std::size_t>(r % bound);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fairgram
