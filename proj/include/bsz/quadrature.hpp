#pragma once

#include <functional>

namespace bsz {

// Adaptive Gauss-Kronrod (G7,K15) integration to an absolute tolerance.
// Panels are bisected while the local |K15 - G7| estimate exceeds the
// panel's tolerance share.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10);

// Integral over [a, +inf) via the substitution y = a + t/(1-t).
// The integrand must decay fast enough to be integrable.
double integrate_tail(const std::function<double(double)>& f, double a,
                      double abs_tol = 1e-10);

}  // namespace bsz
