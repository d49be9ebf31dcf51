#include "bsz/pdmp.hpp"

#include <cmath>
#include <stdexcept>

#include "bsz/quadrature.hpp"

namespace bsz {

double pdmp_a_jump_target(double x, rng& g) {
  return -std::log(std::exp(-x) + g.exp1());
}

PiecewisePath simulate_r(double t0, double horizon, std::optional<double> init, rng& g) {
  if (!(horizon > 0.0)) throw std::invalid_argument("simulate_r: horizon must be positive");
  PiecewisePath path;
  double end = t0 + horizon;
  double t = t0;
  double x = init ? *init : g.gumbel();
  path.add(t, x);
  for (;;) {
    // integrated jump hazard from level x along slope -1 equals e^{-x}(e^s - 1)
    double tj = t + std::log1p(g.exp1() * std::exp(x));
    if (!(tj < end)) {
      path.add(end, x - (end - t));
      break;
    }
    double pre = x - (tj - t);
    path.add(tj, pre);
    double post = pre + g.exp1();
    path.add(tj, post, true);
    t = tj;
    x = post;
  }
  return path;
}

PiecewisePath simulate_a(double t0, double horizon, std::optional<double> init, rng& g) {
  if (!(horizon > 0.0)) throw std::invalid_argument("simulate_a: horizon must be positive");
  PiecewisePath path;
  double end = t0 + horizon;
  double t = t0;
  double x = init ? *init : g.gumbel();
  path.add(t, x);
  for (;;) {
    double tj = t + g.exp1();
    if (!(tj < end)) {
      path.add(end, x + (end - t));
      break;
    }
    double pre = x + (tj - t);
    path.add(tj, pre);
    double post = pdmp_a_jump_target(pre, g);
    path.add(tj, post, true);
    t = tj;
    x = post;
  }
  return path;
}

double transition_cdf_r(double x, double t, double y) {
  if (!(t > 0.0)) throw std::invalid_argument("transition_cdf_r: t must be positive");
  if (y < x - t) return 0.0;
  return std::exp(-std::exp(-y) * (-std::expm1(-t)));
}

double transition_atom_r(double x, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("transition_atom_r: t must be positive");
  return std::exp(-std::exp(-(x - t)) * (-std::expm1(-t)));
}

double semigroup_apply(const std::function<double(double)>& f, double x, double t,
                       double abs_tol) {
  if (t < 0.0) throw std::invalid_argument("semigroup_apply: negative time");
  if (t == 0.0) return f(x);
  double c = -std::expm1(-t);
  double lo = x - t;
  auto dens = [&](double y) {
    double e = std::exp(-y);
    return f(y) * std::exp(-e * c) * e * c;
  };
  double atom = f(lo) * std::exp(-std::exp(-lo) * c);
  double mid = std::max(lo, 0.0) + 45.0;
  return atom + integrate(dens, lo, mid, 0.5 * abs_tol) +
         integrate_tail(dens, mid, 0.5 * abs_tol);
}

double generator_apply(const std::function<double(double)>& f, double x, double abs_tol) {
  const double h = 1e-4;
  double fp =
      (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h);
  double fx = f(x);
  auto integrand = [&](double y) { return std::exp(-y) * (f(y) - fx); };
  double mid = std::max(x, 0.0) + 45.0;
  double jump_part = integrate(integrand, x, mid, 0.5 * abs_tol) +
                     integrate_tail(integrand, mid, 0.5 * abs_tol);
  return -fp + jump_part;
}

}  // namespace bsz
