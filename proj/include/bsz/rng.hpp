#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace bsz {

// SplitMix64 step; used for seed expansion and stream derivation.
inline uint64_t splitmix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++ with hand-rolled variate generation.  Everything downstream
// draws through this type, so simulation output depends only on (seed,
// replicate index), never on platform library details or worker count.
struct rng {
  std::array<uint64_t, 4> s{};

  rng() : rng(0) {}
  explicit rng(uint64_t seed) {
    uint64_t x = seed;
    do {
      for (auto& w : s) w = splitmix64(x);
    } while (s[0] == 0 && s[1] == 0 && s[2] == 0 && s[3] == 0);
  }

  // Derived stream for one replicate; documented scheme (master, idx):
  // seed the generator with master xor golden_ratio*(idx+1), then expand
  // through SplitMix64.  Streams for distinct idx are independent for all
  // practical purposes and reproducible regardless of execution order.
  static rng stream(uint64_t master, uint64_t idx) {
    return rng(master ^ (0x9e3779b97f4a7c15ULL * (idx + 1)));
  }

  static inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t next() {
    uint64_t r = rotl(s[0] + s[3], 23) + s[0];
    uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return r;
  }

  // Uniform on the open interval (0,1); never returns 0, so log(u) is safe.
  double u01() { return double(next() >> 11) * 0x1.0p-53 + 0x1.0p-54; }

  double exp1() { return -std::log(u01()); }
  double exp_rate(double rate) { return exp1() / rate; }

  // Standard Gumbel, cdf exp(-exp(-y)).
  double gumbel() { return -std::log(exp1()); }

  // Unbiased uniform integer in [0, n); Lemire with rejection.
  uint64_t below(uint64_t n) {
    unsigned __int128 m = (unsigned __int128)next() * n;
    auto lo = (uint64_t)m;
    if (lo < n) {
      uint64_t t = (0 - n) % n;
      while (lo < t) {
        m = (unsigned __int128)next() * n;
        lo = (uint64_t)m;
      }
    }
    return (uint64_t)(m >> 64);
  }

  long poisson(double mean);
};

// Poisson sampler: multiplicative inversion for small means, Hormann's
// transformed-rejection (PTRD) above.  O(1) per draw for any mean.
struct poisson_dist {
  double mu{};
  // inversion
  double p0{};
  // PTRD constants
  double b{}, a{}, vr{}, inv_alpha{}, log_mu{};

  explicit poisson_dist(double mean) : mu(mean) {
    if (mu < 10.0) {
      p0 = std::exp(-mu);
    } else {
      b = 0.931 + 2.53 * std::sqrt(mu);
      a = -0.059 + 0.02483 * b;
      vr = 0.9277 - 3.6224 / (b - 2.0);
      inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
      log_mu = std::log(mu);
    }
  }

  long operator()(rng& g) const {
    if (mu < 10.0) {
      long k = 0;
      double prod = g.u01();
      while (prod > p0) {
        ++k;
        prod *= g.u01();
      }
      return k;
    }
    for (;;) {
      double u = g.u01() - 0.5;
      double v = g.u01();
      double us = 0.5 - std::fabs(u);
      auto k = (long)std::floor((2.0 * a / us + b) * u + mu + 0.43);
      if (us >= 0.07 && v <= vr) return k;
      if (k < 0 || (us < 0.013 && v > us)) continue;
      if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
          k * log_mu - mu - std::lgamma(double(k) + 1.0))
        return k;
    }
  }
};

inline long rng::poisson(double mean) {
  poisson_dist d(mean);
  return d(*this);
}

}  // namespace bsz
