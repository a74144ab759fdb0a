// Copyright 2026 The fpgatris Authors
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

// Random instance generator.
//
// Stream definition: std::mt19937_64 seeded with `seed`. A uniform u in
// [0, 1) is the top 53 bits of one engine output times 2^-53. A normal
// sample is Box-Muller's cosine branch on two uniforms u1, u2:
//   mean + sd * sqrt(-2 ln(1 - u1)) * cos(2 pi u2).
// Per module, in order: one normal for the length, then per request one
// normal for the magnitude followed (random sign mode only) by one uniform
// for the sign. The Mersenne Twister output is fixed by the C++ standard,
// so the only platform dependence left is libm's log/cos/sqrt.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fpgatris/core.hpp"

namespace fpgatris {

enum class SignMode { kAllRight, kRandom };

inline const char* sign_mode_name(SignMode m) {
  return m == SignMode::kAllRight ? "all_right" : "random";
}

inline SignMode parse_sign_mode(std::string_view s) {
  if (s == "all_right") return SignMode::kAllRight;
  if (s == "random") return SignMode::kRandom;
  throw std::invalid_argument("unknown sign mode '" + std::string(s) + "'");
}

struct GenParams {
  int width = 50;
  int modules = 20;
  double rmax_fraction = 0.5;
  double length_mean = 10.0;
  double length_variance = 5.0;
  std::uint64_t seed = 1;
  SignMode sign_mode = SignMode::kAllRight;

  int rmax() const {
    return std::max(1, static_cast<int>(std::lround(rmax_fraction * width)));
  }
  double size_mean() const { return rmax() / 2.0; }
  double size_variance() const { return rmax() / 4.0; }

  void validate() const {
    if (width < 1) throw std::invalid_argument("width must be >= 1");
    if (modules < 0) throw std::invalid_argument("module count must be >= 0");
    if (!(rmax_fraction > 0.0 && rmax_fraction <= 1.0)) {
      throw std::invalid_argument("rmax fraction must be in (0, 1]");
    }
    if (length_variance < 0.0) throw std::invalid_argument("variance must be >= 0");
  }
};

class SampleStream {
 public:
  explicit SampleStream(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double normal(double mean, double sd) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(1.0 - u1));
    return mean + sd * radius * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

// Lengths ~ N(length_mean, sqrt(length_variance)) rounded, at least 1.
// Magnitudes ~ N(rmax/2, sqrt(rmax/4)) rounded and clamped to [1, rmax].
// In random sign mode a request flips to the left with probability 1/2. If
// the drawn direction would leave the module with no in-bounds base slot the
// other direction is used, and if neither fits the magnitude is cut to the
// largest one that still fits in the drawn direction.
inline Instance generate_instance(const GenParams& params) {
  params.validate();
  const int n = params.width;
  const int rmax = std::min(params.rmax(), n);
  const double size_sd = std::sqrt(params.size_variance());
  const double length_sd = std::sqrt(params.length_variance);
  SampleStream rng(params.seed);

  std::vector<ModuleSpec> modules;
  modules.reserve(static_cast<std::size_t>(params.modules));
  for (int i = 0; i < params.modules; ++i) {
    const long ell =
        std::max(1L, std::lround(rng.normal(params.length_mean, length_sd)));
    ModuleSpec m;
    Interval bases{1, n};
    for (long j = 0; j < ell; ++j) {
      const long drawn = std::lround(rng.normal(params.size_mean(), size_sd));
      int mag = static_cast<int>(std::clamp(drawn, 1L, static_cast<long>(rmax)));
      bool left = false;
      if (params.sign_mode == SignMode::kRandom) left = rng.uniform() < 0.5;
      // Right growth needs base <= n - mag + 1, left growth needs base >= mag.
      const auto fits = [&](bool to_left, int size) {
        return to_left ? std::max(bases.lo, size) <= bases.hi
                       : bases.lo <= std::min(bases.hi, n - size + 1);
      };
      if (!fits(left, mag)) {
        if (fits(!left, mag)) {
          left = !left;
        } else {
          mag = left ? bases.hi : n - bases.lo + 1;
        }
      }
      if (left) {
        bases.lo = std::max(bases.lo, mag);
      } else {
        bases.hi = std::min(bases.hi, n - mag + 1);
      }
      m.requests.emplace_back(left ? -mag : mag);
    }
    modules.push_back(std::move(m));
  }
  return Instance(n, std::move(modules));
}

// Seed for run `run` of sweep point `point`, derived with splitmix64 so
// neighbouring (point, run) pairs get unrelated streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t point,
                                 std::uint64_t run) {
  const auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ point) ^ run);
}

}  // namespace fpgatris
