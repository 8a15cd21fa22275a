// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace oplearn {

/// Seeded generator addressed by (seed, stream key). The same key always
/// reproduces the same draw sequence, independent of which worker asks for it.
class Rng {
 public:
  Rng(std::uint64_t seed, std::span<const std::uint64_t> stream_key);

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  /// Uniformly +1 or -1.
  double rademacher() { return (engine_() >> 63) != 0 ? 1.0 : -1.0; }
  double chi_squared(double dof) { return std::chi_squared_distribution<double>(dof)(engine_); }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

Rng make_rng(std::uint64_t seed, std::uint64_t stream);
Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream_key);

/// Stream tags used to keep design, noise and posterior draws independent.
enum class StreamPurpose : std::uint64_t { design = 1, noise = 2, posterior = 3, auxiliary = 4 };

}  // namespace oplearn
