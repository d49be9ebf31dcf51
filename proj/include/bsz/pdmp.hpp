#pragma once

#include <functional>
#include <optional>

#include "bsz/piecewise_path.hpp"
#include "bsz/rng.hpp"

namespace bsz {

// Limit processes for the age of the root: r drifts down at slope one and
// jumps up (rate e^{-x} from level x, overshoot Exp(1)); its time reversal a
// drifts up at slope one and jumps down at rate one.  Both are stationary
// with the standard Gumbel law, cdf exp(-e^{-y}).

// level reached when a jumps away from level x
double pdmp_a_jump_target(double x, rng& g);

// Simulate on [t0, t0+horizon].  init absent draws the stationary Gumbel.
// Jumps are stored as pre/post sample pairs per the PiecewisePath convention.
PiecewisePath simulate_r(double t0, double horizon, std::optional<double> init, rng& g);
PiecewisePath simulate_a(double t0, double horizon, std::optional<double> init, rng& g);

// P(r(t) <= y | r(0) = x); includes the atom at x - t once y reaches it
double transition_cdf_r(double x, double t, double y);

// P(r(t) = x - t | r(0) = x), the no-jump atom
double transition_atom_r(double x, double t);

// E[f(r(t)) | r(0) = x] by quadrature: atom term plus absolutely continuous
// part.  f must be bounded and integrable against the transition density.
double semigroup_apply(const std::function<double(double)>& f, double x, double t,
                       double abs_tol = 1e-8);

// generator: -f'(x) + int_x^inf e^{-y} (f(y) - f(x)) dy, with f' taken by
// central difference; f should be C^2 and bounded
double generator_apply(const std::function<double(double)>& f, double x,
                       double abs_tol = 1e-8);

}  // namespace bsz
