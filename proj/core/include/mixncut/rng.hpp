#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace mixncut {

__extension__ using uint128 = unsigned __int128;

/// SplitMix64 generator. Streams are keyed by (seed, stream id), so draw t
/// of a sampler can be regenerated independently of every other draw.
class Rng {
 public:
  explicit Rng(std::uint64_t state) noexcept : state_(state) {}

  static Rng stream(std::uint64_t seed, std::uint64_t id) noexcept {
    return Rng(mix(seed ^ mix(id + 0x632be59bd9b4e019ULL)));
  }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound), unbiased (Lemire's method).
  std::uint64_t below(std::uint64_t bound) noexcept {
    uint128 product =
        static_cast<uint128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        product = static_cast<uint128>(next()) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

  /// Standard normal via Box-Muller; both uniforms drawn fresh every call.
  double normal() noexcept {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Two independent standard normals from one Box-Muller transform.
  std::pair<double, double> normal_pair() noexcept {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

 private:
  std::uint64_t state_;
};

}  // namespace mixncut
