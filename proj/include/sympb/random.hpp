#pragma once

#include <cstdint>
#include <numbers>
#include <random>

/**
 * \file random.hpp
 *
 * @brief Seeded, substream-addressable random numbers.
 *
 * Every random quantity in sympb is drawn from a generator derived from an explicit ``(seed, stream)`` pair, so results
 * do not depend on how work is split across threads. Uniform doubles are produced by bit manipulation rather than
 * ``std::uniform_real_distribution`` because the latter is implementation-defined.
 */

namespace sympb {

  namespace detail {

    constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
      x += 0x9E3779B97F4A7C15ULL;
      x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
      x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
      return x ^ (x >> 31);
    }

  }  // namespace detail

  /// Pseudo-random generator bound to one substream of a seed.
  class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : m_engine(detail::splitmix64(detail::splitmix64(seed) ^ detail::splitmix64(stream + 0x632BE59BD9B4E019ULL))) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(m_engine() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    double angle() noexcept { return 2.0 * std::numbers::pi * uniform(); }

    std::uint64_t bits() noexcept { return m_engine(); }

  private:
    std::mt19937_64 m_engine;
  };

}  // namespace sympb
