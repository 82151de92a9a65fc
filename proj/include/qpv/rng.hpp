// Copyright 2026 The qpv Authors
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

#ifndef QPV_RNG_HPP
#define QPV_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "qpv/core.hpp"

namespace qpv {

// Counter-keyed SplitMix64 stream. Every (seed, counter, stream) triple
// yields an independent sequence, so rounds can be evaluated in any order.
// Distributions are computed by hand rather than via <random> so results are
// identical across standard libraries.
class KeyedRng {
 public:
  KeyedRng(std::uint64_t seed, std::uint64_t counter, std::uint64_t stream = 0) {
    state_ = mix(seed ^ 0x243F6A8885A308D3ull);
    state_ = mix(state_ ^ (counter * 0x9E3779B97F4A7C15ull));
    state_ = mix(state_ ^ (stream * 0xD1B54A32D192ED03ull + 0x13198A2E03707344ull));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) {
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    return uniform() < p;
  }

  /// Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  cplx complex_normal() {
    const double re = normal();
    return {re, normal()};
  }

  /// Index drawn from unnormalized nonnegative weights.
  std::size_t categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (u < weights[i]) return i;
      u -= weights[i];
    }
    for (std::size_t i = weights.size(); i-- > 0;) {
      if (weights[i] > 0.0) return i;
    }
    return 0;
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Gaussian vector with i.i.d. standard complex normal entries.
inline CVector gaussian_vector(KeyedRng& rng, Eigen::Index n) {
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.complex_normal();
  return v;
}

}  // namespace qpv

#endif  // QPV_RNG_HPP
