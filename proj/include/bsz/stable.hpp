#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "bsz/piecewise_path.hpp"
#include "bsz/rng.hpp"

namespace bsz {

// Truncated index-1 stable path: jumps above eps are kept and the removed
// small jumps are compensated by a drift of 1 - gamma - log(eps) per unit
// time.  The observation origin sits at path time 0; windows with t0 < 0
// carry history, so value(0) is zero only for windows starting at 0.
struct StableJump {
  double t{};
  double x{};
};

struct StablePath {
  double eps{};
  double t0{};
  double t1{};
  double drift{};
  std::vector<StableJump> jumps;  // strictly increasing times, sizes > eps

  // drift * t minus the sizes of all jumps at times <= t, summed in time order
  double value(double t) const;
  bool valid() const;
};

// compensating drift rate for truncation level eps
double stable_drift(double eps);

StablePath simulate_stable(double eps, double horizon, rng& g);  // window [0, horizon]
StablePath simulate_stable_window(double eps, double t0, double t1, rng& g);

// two-parameter increment: jumps in path time (-s, -s+t], equal to
// value(-s + t) - value(-s)
double two_parameter_stable(const StablePath& path, double s, double t);

// block-count limit y(t) = e^{-t} value(t) + e^{-t} t^2 / 2, sampled on the
// grid plus a pre/post pair at every jump inside the grid span
PiecewisePath limit_block_path(const StablePath& path, const std::vector<double>& grid);

// branch-length limit at lookback s:
//   1 - J(s) + drift (1 - e^{-tail}) - sum_{t_j in (-s, -s+tail]} e^{-(t_j+s)} x_j
// where J(s) is the size of a jump sitting exactly at -s, if any
double limit_length(const StablePath& path, double s, double tail = 40.0);

// driver z(t) = (value(0) - value(-t)) + t - J(t)
double ou_z_value(const StablePath& path, double t);

// max over the grid of |L(t) - L(0) - z(t) + int_0^t L ds|; the integral is a
// trapezoid sum on the grid augmented with the jump-crossing knots -t_j (with
// left limits there), which keeps the quadrature error second order
double ou_pathwise_residual(const StablePath& path, const std::vector<double>& grid,
                            double tail = 40.0);

// Marginal sampler for value(t) of a fresh [0, t] path.  Replicate r draws
// its Poisson jump count from stream (master, 2r) and its jump sizes from
// stream (master, 2r+1); the batched kernel runs four replicates in lockstep
// and is bit-identical to the scalar form lane by lane.
double stable_marginal(double eps, double t, uint64_t master, uint64_t replicate);
std::vector<double> stable_marginal_batch(double eps, double t, uint64_t master,
                                          std::size_t count);

// one draw of the stationary branch-length limit L(0), jump window (0, tail]
double ou_marginal_sample(double eps, double tail, rng& g);

// Ornstein-Uhlenbeck-type generator data (a, b, nu, c); the Levy density nu
// is fixed to x^{-2} on (-inf, 0)
struct OuTypeSpec {
  double a{};
  double b{};
  double c{1.0};
};

// generator data of the branch-length limit process
OuTypeSpec ou_length_spec();

// stationary characteristic function, evaluated by quadrature
std::complex<double> ou_stationary_cf(const OuTypeSpec& spec, double u);

// tail mass rho((-inf, -z]) of the stationary jump measure, by quadrature
double ou_rho_tail(const OuTypeSpec& spec, double z);

}  // namespace bsz
