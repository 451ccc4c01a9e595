// Copyright 2026 The jointembed Authors.
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

#ifndef JOINTEMBED_RNG_HPP
#define JOINTEMBED_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace jointembed::rng {

// Counter-based generator built on the SplitMix64 finalizer.
//
// Every random quantity is addressed by a 64-bit stream key and a counter.
// Keys form a tree: derive(parent, index) names child stream `index` of
// `parent`, so a sampler can give graph i the key derive(root, i) and edge
// (s, t) the counter s * n + t. Values therefore depend only on
// (seed, path, counter), never on evaluation order or worker count.

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive(std::uint64_t parent, std::uint64_t index) noexcept {
  return mix(parent ^ mix(index * kGolden + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t bits(std::uint64_t key, std::uint64_t counter) noexcept {
  return mix(key + (counter + 1) * kGolden);
}

/// Uniform double in [0, 1) with 53 random bits.
constexpr double uniform(std::uint64_t key, std::uint64_t counter) noexcept {
  return static_cast<double>(bits(key, counter) >> 11) * 0x1.0p-53;
}

// Stream tags used to separate independent uses of one seed.
enum class Tag : std::uint64_t {
  edges = 1,
  loadings = 2,
  blocks = 3,
  init = 4,
  kmeans = 5,
  experiment = 6,
  labels = 7,
};

constexpr std::uint64_t derive(std::uint64_t parent, Tag tag) noexcept {
  return derive(parent, static_cast<std::uint64_t>(tag) | (1ULL << 63));
}

/// Sequential view over one stream; satisfies UniformRandomBitGenerator.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Stream(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept { return bits(key_, counter_++); }

  double uniform() noexcept { return rng::uniform(key_, counter_++); }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Integer in [0, bound) by rejection, free of modulo bias.
  std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % bound;
  }

  /// Standard normal via Box-Muller (one draw per call).
  double normal() noexcept {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace jointembed::rng

#endif  // JOINTEMBED_RNG_HPP
