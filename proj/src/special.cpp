#include "bsz/special.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace bsz {

double log_binom(long n, long k) {
  if (k < 0 || k > n) throw std::invalid_argument("log_binom: k out of range");
  return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
         std::lgamma(double(n - k) + 1.0);
}

double harmonic(long n) {
  if (n < 0) throw std::invalid_argument("harmonic: n < 0");
  static thread_local std::vector<double> h{0.0};
  while ((long)h.size() <= n) h.push_back(h.back() + 1.0 / double(h.size()));
  return h[size_t(n)];
}

namespace {

// series expansion of P(a,x), valid for x < a+1
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 10000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw std::runtime_error("gamma_p: series failed to converge");
}

// continued fraction for Q(a,x), valid for x >= a+1 (modified Lentz)
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16)
      return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
  }
  throw std::runtime_error("gamma_q: continued fraction failed to converge");
}

}  // namespace

double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi2_pvalue(double df, double x) { return gamma_q(0.5 * df, 0.5 * x); }

double kolmogorov_q(double c) {
  if (c <= 0.0) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    double term = std::exp(-2.0 * double(k) * double(k) * c * c);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-18) break;
  }
  return 2.0 * sum;
}

void sin_cos_integrals(double x, double& si, double& ci) {
  if (!(x > 0.0)) throw std::invalid_argument("sin_cos_integrals: x must be positive");
  if (x <= 2.0) {
    // power series
    double p = x;  // (-1)^k x^{2k+1} / (2k+1)!
    double s = x;
    double q = 1.0;  // (-1)^k x^{2k} / (2k)!
    double c = 0.0;
    for (int k = 1; k <= 60; ++k) {
      q *= -x * x / (double(2 * k - 1) * double(2 * k));
      c += q / double(2 * k);
      p *= -x * x / (double(2 * k) * double(2 * k + 1));
      s += p / double(2 * k + 1);
      if (std::fabs(p) < 1e-18 && std::fabs(q) < 1e-18) break;
    }
    si = s;
    ci = std::numbers::egamma + std::log(x) + c;
    return;
  }
  // E1(ix) by modified Lentz on the even continued fraction; then
  // Ci(x) = -Re E1(ix), Si(x) = pi/2 + Im E1(ix)
  std::complex<double> z(0.0, x);
  std::complex<double> b = z + 1.0;
  std::complex<double> c = 1.0 / 1e-290;
  std::complex<double> d = 1.0 / b;
  std::complex<double> h = d;
  for (int k = 1; k <= 400; ++k) {
    double a = -double(k) * double(k);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    std::complex<double> del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) {
      std::complex<double> e1 = std::complex<double>(std::cos(x), -std::sin(x)) * h;
      ci = -e1.real();
      si = 0.5 * std::numbers::pi + e1.imag();
      return;
    }
  }
  throw std::runtime_error("sin_cos_integrals: continued fraction failed to converge");
}

}  // namespace bsz
