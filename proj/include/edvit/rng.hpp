#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace edvit {

// Seeded generator with hand-rolled distributions so that streams are
// bit-reproducible across standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next() { return eng_(); }

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; one variate per pair of uniforms.
  double normal() {
    double u1 = 1.0 - unit();  // (0, 1]
    double u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  float normal(float stddev) { return static_cast<float>(normal() * stddev); }

  // Uniform index in [0, n). Modulo bias is irrelevant at the sizes used here.
  int64_t bounded(int64_t n) { return static_cast<int64_t>(eng_() % static_cast<uint64_t>(n)); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (int64_t i = static_cast<int64_t>(v.size()) - 1; i > 0; --i) {
      std::swap(v[static_cast<size_t>(i)], v[static_cast<size_t>(bounded(i + 1))]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace edvit
