#pragma once

namespace bsz {

// log of the binomial coefficient C(n, k)
double log_binom(long n, long k);

// H_n = sum_{k=1}^{n} 1/k, cached incrementally
double harmonic(long n);

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x)
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper tail of the chi-square distribution with df degrees of freedom
double chi2_pvalue(double df, double x);

// Kolmogorov distribution tail Q(c) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 c^2)
double kolmogorov_q(double c);

// Sine and cosine integrals for x > 0:
//   Si(x) = int_0^x sin(t)/t dt,  Ci(x) = gamma + log(x) + int_0^x (cos(t)-1)/t dt
void sin_cos_integrals(double x, double& si, double& ci);

}  // namespace bsz
