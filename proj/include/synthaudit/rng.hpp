#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "synthaudit/error.hpp"

namespace synthaudit {

// Deterministic PRNG with a fixed algorithm so that results are identical
// across platforms and standard library versions (std::uniform_* and
// std::normal_distribution are implementation defined).
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound). Rejection sampling, no modulo bias.
  uint64_t next_below(uint64_t bound) {
    require(bound > 0, Errc::out_of_range, "next_below: bound must be positive");
    uint64_t threshold = (0ULL - bound) % bound;
    for (;;) {
      uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  // Standard normal via Box-Muller; caches the second variate.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    if (v.size() < 2) return;
    for (size_t i = v.size() - 1; i > 0; --i) {
      size_t j = static_cast<size_t>(next_below(i + 1));
      using std::swap;
      swap(v[i], v[j]);
    }
  }

  // Sample `k` distinct indices from [0, n), in selection order.
  std::vector<size_t> sample_indices(size_t n, size_t k) {
    require(k <= n, Errc::out_of_range, "sample_indices: k exceeds n");
    std::vector<size_t> pool(n);
    for (size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<size_t> out;
    out.reserve(k);
    for (size_t i = 0; i < k; ++i) {
      size_t j = i + static_cast<size_t>(next_below(n - i));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    return out;
  }

  // Independent stream seed derived from a master seed and a stream index.
  static uint64_t derive(uint64_t master, uint64_t stream) {
    uint64_t z = master ^ (0x9e3779b97f4a7c15ULL + (stream << 1));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace synthaudit
