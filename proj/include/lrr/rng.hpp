#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace lrr {

// Counter-based pseudorandom generator built on the SplitMix64 output
// function (Steele, Lea & Flood 2014). A stream is identified by a 64-bit
// key; successive outputs are the SplitMix64 mixes of key + i*GOLDEN.
// Substreams are derived by hashing extra 64-bit tags into the key, so any
// (seed, replicate, row, ...) tuple maps to its own independent stream and
// results do not depend on evaluation order or worker count. The algorithm
// is fixed; changing it would change every seeded result.
class SubstreamRng {
 public:
  explicit SubstreamRng(std::uint64_t key) : state_(key) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Hash one tag into a key. Chain calls to bind several tags.
  static std::uint64_t derive(std::uint64_t key, std::uint64_t tag) {
    return mix(key ^ mix(tag + 0xD1B54A32D192ED03ull));
  }
  static std::uint64_t derive(std::uint64_t key, std::uint64_t a, std::uint64_t b) {
    return derive(derive(key, a), b);
  }
  static std::uint64_t derive(std::uint64_t key, std::uint64_t a, std::uint64_t b,
                              std::uint64_t c) {
    return derive(derive(key, a, b), c);
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform on [0,1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1]; safe as a log() argument.
  double next_unit_open() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Unbiased uniform draw on {0,...,bound-1} (Lemire multiply-shift with
  // rejection).
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) return 0;
    while (true) {
      const std::uint64_t x = next_u64();
      const unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
      const std::uint64_t low = static_cast<std::uint64_t>(m);
      if (low >= bound || low >= (0 - bound) % bound) {
        return static_cast<std::uint64_t>(m >> 64);
      }
    }
  }

  bool next_bernoulli(double p) { return next_unit() < p; }

  // Standard normal pair via the Box-Muller transform.
  void next_normal_pair(double& z0, double& z1) {
    const double u1 = next_unit_open();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    z0 = r * std::cos(a);
    z1 = r * std::sin(a);
  }

  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double z0, z1;
    next_normal_pair(z0, z1);
    spare_ = z1;
    have_spare_ = true;
    return z0;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace lrr
