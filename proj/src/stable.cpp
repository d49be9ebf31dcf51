#include "bsz/stable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bsz/quadrature.hpp"
#include "bsz/special.hpp"

namespace bsz {

double stable_drift(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("stable_drift: eps must be positive");
  return 1.0 - std::numbers::egamma - std::log(eps);
}

double StablePath::value(double t) const {
  double s = 0.0;
  for (const auto& j : jumps) {
    if (j.t > t) break;
    s += j.x;
  }
  return drift * t - s;
}

bool StablePath::valid() const {
  if (!(eps > 0.0) || !(t1 > t0)) return false;
  double prev = t0;
  for (size_t i = 0; i < jumps.size(); ++i) {
    const auto& j = jumps[i];
    if (!(j.x > eps)) return false;
    if (j.t > t1 || j.t < t0) return false;
    if (i > 0 && !(j.t > prev)) return false;
    prev = j.t;
  }
  return true;
}

StablePath simulate_stable_window(double eps, double t0, double t1, rng& g) {
  if (!(eps > 0.0) || !(t1 > t0))
    throw std::invalid_argument("simulate_stable_window: bad parameters");
  StablePath p{eps, t0, t1, stable_drift(eps), {}};
  double span = t1 - t0;
  long n = g.poisson(span / eps);
  p.jumps.reserve((size_t)n);
  for (long i = 0; i < n; ++i) {
    double t = t0 + span * g.u01();
    double x = eps / g.u01();
    p.jumps.push_back({t, x});
  }
  std::sort(p.jumps.begin(), p.jumps.end(),
            [](const StableJump& a, const StableJump& b) { return a.t < b.t; });
  return p;
}

StablePath simulate_stable(double eps, double horizon, rng& g) {
  return simulate_stable_window(eps, 0.0, horizon, g);
}

double two_parameter_stable(const StablePath& path, double s, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("two_parameter_stable: negative duration");
  if (-s < path.t0 || -s + t > path.t1)
    throw std::invalid_argument("two_parameter_stable: window too short");
  return path.value(-s + t) - path.value(-s);
}

PiecewisePath limit_block_path(const StablePath& path, const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("limit_block_path: empty grid");
  for (size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < path.t0 || grid[i] > path.t1)
      throw std::invalid_argument("limit_block_path: grid outside path window");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw std::invalid_argument("limit_block_path: grid not increasing");
  }
  auto y = [&](double u, double v) {
    double w = std::exp(-u);
    return w * v + w * (0.5 * u * u);
  };
  PiecewisePath out;
  double run = 0.0;
  size_t ji = 0;
  while (ji < path.jumps.size() && path.jumps[ji].t < grid.front()) {
    run += path.jumps[ji].x;
    ++ji;
  }
  for (double gpt : grid) {
    bool covered = false;
    while (ji < path.jumps.size() && path.jumps[ji].t <= gpt) {
      double tj = path.jumps[ji].t;
      out.add(tj, y(tj, path.drift * tj - run));
      run += path.jumps[ji].x;
      out.add(tj, y(tj, path.drift * tj - run), true);
      if (tj == gpt) covered = true;
      ++ji;
    }
    if (!covered) out.add(gpt, y(gpt, path.drift * gpt - run));
  }
  return out;
}

namespace {

// size of a jump sitting exactly at path time t, else 0
double jump_exactly_at(const StablePath& path, double t) {
  auto it = std::lower_bound(path.jumps.begin(), path.jumps.end(), t,
                             [](const StableJump& j, double v) { return j.t < v; });
  if (it != path.jumps.end() && it->t == t) return it->x;
  return 0.0;
}

}  // namespace

double limit_length(const StablePath& path, double s, double tail) {
  if (!(tail >= 20.0)) throw std::invalid_argument("limit_length: tail must be at least 20");
  double a = -s;
  double b = -s + tail;
  if (a < path.t0 || b > path.t1)
    throw std::invalid_argument("limit_length: window too short");
  auto it = std::lower_bound(path.jumps.begin(), path.jumps.end(), a,
                             [](const StableJump& j, double v) { return j.t < v; });
  double at_anchor = 0.0;
  if (it != path.jumps.end() && it->t == a) {
    at_anchor = it->x;
    ++it;
  }
  double sum = 0.0;
  for (; it != path.jumps.end() && it->t <= b; ++it)
    sum += std::exp(-(it->t + s)) * it->x;
  return 1.0 - at_anchor + path.drift * (-std::expm1(-tail)) - sum;
}

double ou_z_value(const StablePath& path, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("ou_z_value: negative time");
  if (-t < path.t0 || path.t1 < 0.0)
    throw std::invalid_argument("ou_z_value: window too short");
  return (path.value(0.0) - path.value(-t)) + t - jump_exactly_at(path, -t);
}

double ou_pathwise_residual(const StablePath& path, const std::vector<double>& grid,
                            double tail) {
  if (grid.size() < 2 || grid.front() != 0.0)
    throw std::invalid_argument("ou_pathwise_residual: grid must start at 0");
  for (size_t i = 1; i < grid.size(); ++i) {
    double h = grid[i] - grid[i - 1];
    if (!(h > 0.0) || h > 1.0000001e-3)
      throw std::invalid_argument("ou_pathwise_residual: grid spacing must be <= 1e-3");
  }
  double end = grid.back();
  std::vector<double> merged(grid);
  for (const auto& j : path.jumps)
    if (j.t > -end && j.t < 0.0) merged.push_back(-j.t);
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

  std::vector<double> lvals(merged.size());
  for (size_t i = 0; i < merged.size(); ++i) lvals[i] = limit_length(path, merged[i], tail);

  double l0 = limit_length(path, 0.0, tail);
  double acc = 0.0;
  double resid = 0.0;
  size_t gi = 0;
  for (size_t i = 0; i < merged.size(); ++i) {
    if (i > 0) {
      // left limit at a crossing knot adds back the jump that entered there
      double left = lvals[i] + jump_exactly_at(path, -merged[i]);
      acc += 0.5 * (merged[i] - merged[i - 1]) * (lvals[i - 1] + left);
    }
    if (gi < grid.size() && merged[i] == grid[gi]) {
      double z = ou_z_value(path, merged[i]);
      resid = std::max(resid, std::fabs(lvals[i] - l0 - z + acc));
      ++gi;
    }
  }
  return resid;
}

double stable_marginal(double eps, double t, uint64_t master, uint64_t replicate) {
  if (!(eps > 0.0) || !(t > 0.0))
    throw std::invalid_argument("stable_marginal: bad parameters");
  poisson_dist pd(t / eps);
  rng gc = rng::stream(master, 2 * replicate);
  long n = pd(gc);
  rng gs = rng::stream(master, 2 * replicate + 1);
  double sum = 0.0;
  for (long i = 0; i < n; ++i) sum += eps / gs.u01();
  double base = stable_drift(eps) * t;
  return base - sum;
}

#if defined(__GNUC__)
namespace {

typedef unsigned long long u64x4 __attribute__((vector_size(32)));
typedef long long i64x4 __attribute__((vector_size(32)));
typedef double f64x4 __attribute__((vector_size(32)));

inline u64x4 rotl4(u64x4 x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace
#endif

std::vector<double> stable_marginal_batch(double eps, double t, uint64_t master,
                                          std::size_t count) {
  if (!(eps > 0.0) || !(t > 0.0))
    throw std::invalid_argument("stable_marginal_batch: bad parameters");
  std::vector<double> out(count);
  std::size_t r = 0;
#if defined(__GNUC__)
  poisson_dist pd(t / eps);
  double base = stable_drift(eps) * t;
  for (; r + 4 <= count; r += 4) {
    long n[4];
    u64x4 s0{}, s1{}, s2{}, s3{};
    for (int lane = 0; lane < 4; ++lane) {
      rng gc = rng::stream(master, 2 * (r + lane));
      n[lane] = pd(gc);
      rng gs = rng::stream(master, 2 * (r + lane) + 1);
      s0[lane] = gs.s[0];
      s1[lane] = gs.s[1];
      s2[lane] = gs.s[2];
      s3[lane] = gs.s[3];
    }
    long maxn = std::max(std::max(n[0], n[1]), std::max(n[2], n[3]));
    i64x4 nv{};
    for (int lane = 0; lane < 4; ++lane) nv[lane] = n[lane];
    i64x4 iv = {0, 0, 0, 0};
    const i64x4 onev = {1, 1, 1, 1};
    f64x4 sum = {0.0, 0.0, 0.0, 0.0};
    for (long i = 0; i < maxn; ++i) {
      u64x4 res = rotl4(s0 + s3, 23) + s0;
      u64x4 tt = s1 << 17;
      s2 ^= s0;
      s3 ^= s1;
      s1 ^= s2;
      s0 ^= s3;
      s2 ^= tt;
      s3 = rotl4(s3, 45);
      // same arithmetic as rng::u01, lane-wise
      f64x4 u = __builtin_convertvector(res >> 11, f64x4) * 0x1.0p-53 + 0x1.0p-54;
      f64x4 add = eps / u;
      i64x4 live = iv < nv;
      add = (f64x4)((i64x4)add & live);
      sum += add;
      iv += onev;
    }
    // exhausted lanes only ever add +0.0 above, so each lane's sum carries the
    // exact bits of the scalar per-replicate accumulation
    for (int lane = 0; lane < 4; ++lane) out[r + lane] = base - sum[lane];
  }
#endif
  for (; r < count; ++r) out[r] = stable_marginal(eps, t, master, r);
  return out;
}

double ou_marginal_sample(double eps, double tail, rng& g) {
  if (!(eps > 0.0) || !(tail > 0.0))
    throw std::invalid_argument("ou_marginal_sample: bad parameters");
  long n = g.poisson(tail / eps);
  double sum = 0.0;
  for (long i = 0; i < n; ++i) {
    double u = tail * g.u01();
    double x = eps / g.u01();
    sum += std::exp(-u) * x;
  }
  return 1.0 + stable_drift(eps) * (-std::expm1(-tail)) - sum;
}

OuTypeSpec ou_length_spec() { return {2.0 - std::numbers::egamma, 0.0, 1.0}; }

std::complex<double> ou_stationary_cf(const OuTypeSpec& spec, double u) {
  if (!(spec.c > 0.0) || spec.b < 0.0)
    throw std::invalid_argument("ou_stationary_cf: invalid generator data");
  if (u == 0.0) return {1.0, 0.0};
  double w = std::fabs(u);
  // compensated jump integral against the stationary measure, split at 1;
  // the substitution x = -v turns the density into v^{-2} on (0, inf)
  double core_re =
      integrate([w](double v) { return (1.0 - std::cos(w * v)) / (v * v); }, 0.0, 1.0);
  double core_im =
      integrate([w](double v) { return (std::sin(w * v) - w * v) / (v * v); }, 0.0, 1.0);
  double si = 0.0, ci = 0.0;
  sin_cos_integrals(w, si, ci);
  // int_1^inf (1 - cos(wv)) v^{-2} dv and int_1^inf sin(wv) v^{-2} dv by parts
  double tail_re = 1.0 - std::cos(w) + w * (0.5 * std::numbers::pi - si);
  double tail_im = std::sin(w) - w * ci;
  double re_part = (core_re + tail_re) / spec.c;
  double im_part = (core_im + tail_im) / spec.c;
  if (u < 0.0) im_part = -im_part;
  double alpha = (spec.a - 1.0) / spec.c;
  double beta = spec.b / (2.0 * spec.c);
  return std::exp(
      std::complex<double>(-0.5 * beta * u * u - re_part, alpha * u - im_part));
}

double ou_rho_tail(const OuTypeSpec& spec, double z) {
  if (!(spec.c > 0.0)) throw std::invalid_argument("ou_rho_tail: invalid generator data");
  if (!(z > 0.0)) throw std::invalid_argument("ou_rho_tail: z must be positive");
  auto outer = [z](double s) {
    double lo = z * std::exp(s);
    if (!std::isfinite(lo)) return 0.0;
    return integrate_tail([](double v) { return 1.0 / (v * v); }, lo, 1e-12);
  };
  return integrate_tail(outer, 0.0, 1e-10) / spec.c;
}

}  // namespace bsz
