#pragma once

#include "ldvqr/smoothing.hpp"

#include <cstdint>
#include <random>

namespace ldvqr {

// Deterministic seeded generator. Uniform draws come straight from the
// mt19937_64 word stream and normals use the inverse CDF, so the sequence is
// identical across platforms for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(mix(seed ^ 0x6a09e667f3bcc909ull)) {}

  // Independent stream addressed by (master, id, sub); used to give each
  // bootstrap replicate and Monte Carlo repetition its own generator.
  static Rng stream(std::uint64_t master, std::uint64_t id, std::uint64_t sub = 0) {
    std::uint64_t s = mix(master + 0x9e3779b97f4a7c15ull);
    s = mix(s ^ mix(id + 0xbf58476d1ce4e5b9ull));
    s = mix(s ^ mix(sub + 0x94d049bb133111ebull));
    return Rng(s);
  }

  /// Uniform on the open interval (0,1).
  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return gauss_quantile(uniform()); }

  /// Chi-squared with 1 df as the square of a normal draw.
  double chisq1() {
    const double z = normal();
    return z * z;
  }

  /// Index uniform on {0,...,n-1}.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(gen_()) * n) >> 64);
  }

  std::uint64_t word() { return gen_(); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::mt19937_64 gen_;
};

}  // namespace ldvqr
