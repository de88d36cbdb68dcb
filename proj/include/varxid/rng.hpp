#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace varxid {

// splitmix64 finalizer; decorrelates derived seeds
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// deterministic sub-stream seed for (master, i); chain for more levels
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t i) {
  return mix64(master ^ mix64(i + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t i, std::uint64_t j) {
  return derive_seed(derive_seed(master, i), j);
}

// engine + portable scalar samplers (identical streams across platforms)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform01() {  // [0,1) with 53-bit resolution
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {  // Box-Muller, cosine branch only: stateless stream
    double u1 = 0.0;
    do { u1 = uniform01(); } while (u1 <= 0.0);
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double uniform_sym(double a) {  // uniform on [-a, a]
    return a * (2.0 * uniform01() - 1.0);
  }

  double rademacher(double a) {  // +/- a with equal probability
    return (eng_() & 1u) ? a : -a;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace varxid
