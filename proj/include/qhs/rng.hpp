#pragma once

#include <cmath>
#include <cstdint>

namespace qhs {

// Counter-based seeding: any (master, a, b, c) tuple maps to an independent
// stream, so Monte-Carlo results do not depend on execution order and any
// slice of a spectrum can be regenerated without drawing its neighbours.
inline uint64_t splitmix64_next(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t mix_seed(uint64_t master, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
  uint64_t s = master;
  s ^= splitmix64_next(s) + a;
  s ^= splitmix64_next(s) + b;
  s ^= splitmix64_next(s) + c;
  return splitmix64_next(s);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() { return splitmix64_next(state_); }

  // uniform in (0,1)
  double uniform() {
    return (next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  // Marsaglia-Tsang; valid for shape >= 1.
  double gamma(double shape) {
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double t = 1.0 + c * x;
      if (t <= 0.0) continue;
      double v = t * t * t;
      double u = uniform();
      double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

 private:
  uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace qhs
