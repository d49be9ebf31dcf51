#include "bsz/rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bsz/quadrature.hpp"
#include "bsz/special.hpp"

namespace bsz {

namespace {

void check_bk(long b, long k) {
  if (b < 2 || k < 2 || k > b)
    throw std::invalid_argument("merger rate: need 2 <= k <= b");
}

// C(m, j) by a stable product; stays in range for m <= 1000
double binom_product(long m, long j) {
  j = std::min(j, m - j);
  double c = 1.0;
  for (long i = 1; i <= j; ++i) c = c * double(m - j + i) / double(i);
  return c;
}

// switch to log-gamma arithmetic once the inner binomial could overflow
constexpr long product_limit = 1000;

}  // namespace

double merger_rate(long b, long k) {
  check_bk(b, k);
  if (b <= product_limit)
    return 1.0 / (double(b - 1) * binom_product(b - 2, k - 2));
  return std::exp(log_merger_rate(b, k));
}

double log_merger_rate(long b, long k) {
  check_bk(b, k);
  return std::lgamma(double(k - 1)) + std::lgamma(double(b - k + 1)) -
         std::lgamma(double(b));
}

double total_merger_rate(long b) {
  if (b < 2) throw std::invalid_argument("total_merger_rate: b < 2");
  double sum = 0.0, comp = 0.0;  // Kahan
  for (long k = 2; k <= b; ++k) {
    double term;
    if (b <= product_limit)
      term = binom_product(b, k) * merger_rate(b, k);
    else
      term = std::exp(log_binom(b, k) + log_merger_rate(b, k));
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double merger_size_pmf(long b, long k) {
  check_bk(b, k);
  return double(b) / (double(b - 1) * double(k) * double(k - 1));
}

double merger_size_tail(long b, long k) {
  if (b < 2 || k < 2) throw std::invalid_argument("merger_size_tail: need b,k >= 2");
  if (k > b) return 0.0;
  return (double(b) / double(k - 1) - 1.0) / double(b - 1);
}

long sample_merger_size(long b, rng& g) {
  if (b < 2) throw std::invalid_argument("sample_merger_size: b < 2");
  double u = g.u01();
  // invert P(K >= k) = (b/(k-1) - 1)/(b-1)
  auto k = (long)std::floor(1.0 + double(b) / (u * double(b - 1) + 1.0));
  return std::clamp(k, 2L, b);
}

double block_loss_rate(long b) {
  if (b < 1) throw std::invalid_argument("block_loss_rate: b < 1");
  return double(b) * (harmonic(b) - 1.0);
}

namespace {

// (b y - 1 + (1-y)^b) / y^2, evaluated by its alternating series
// C(b,2) - C(b,3) y + C(b,4) y^2 - ... when b*y is small
double loss_integrand(long b, double y) {
  if (double(b) * y < 0.1) {
    double term = 0.5 * double(b) * double(b - 1);  // C(b,2)
    double sum = term;
    for (long j = 3; j <= b; ++j) {
      term *= -double(b - j + 1) / double(j) * y;
      sum += term;
      if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    }
    return sum;
  }
  return (double(b) * y - 1.0 + std::exp(double(b) * std::log1p(-y))) / (y * y);
}

// (b y (1-y) + (b y - 1)^2 - (1-y)^b) / y^2
// = C(b,2) + C(b,3) y - C(b,4) y^2 + ... for small b*y
double second_moment_integrand(long b, double y) {
  if (double(b) * y < 0.1) {
    double term = 0.5 * double(b) * double(b - 1);
    double sum = term;
    double sign = 1.0;
    for (long j = 3; j <= b; ++j) {
      term *= double(b - j + 1) / double(j) * y;
      sum += sign * term;
      if (term < 1e-18 * std::fabs(sum)) break;
      sign = -sign;
    }
    return sum;
  }
  double by = double(b) * y;
  return (by * (1.0 - y) + (by - 1.0) * (by - 1.0) -
          std::exp(double(b) * std::log1p(-y))) /
         (y * y);
}

// (1 - (1-y)^b - b y (1-y)^{b-1}) / y^2; pmf walk from k = 2 when b*y is
// small, complement form otherwise
double total_rate_integrand(long b, double y) {
  if (double(b) * y <= 0.5) {
    double base = std::exp(double(b - 2) * std::log1p(-y));
    double term = 0.5 * double(b) * double(b - 1) * base;  // k = 2 term / y^2
    double sum = term;
    double r = y / (1.0 - y);
    for (long k = 3; k <= b; ++k) {
      term *= double(b - k + 1) / double(k) * r;
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    return sum;
  }
  double p0 = std::exp(double(b) * std::log1p(-y));
  double p1 = double(b) * y * std::exp(double(b - 1) * std::log1p(-y));
  return (1.0 - p0 - p1) / (y * y);
}

void check_cutoff(long b, double cutoff) {
  if (b < 1 || !(cutoff > 0.0) || cutoff > 1.0)
    throw std::invalid_argument("truncated rate: need b >= 1 and cutoff in (0,1]");
}

}  // namespace

double truncated_block_loss_rate(long b, double cutoff) {
  check_cutoff(b, cutoff);
  return integrate([b](double y) { return loss_integrand(b, y); }, 0.0, cutoff, 1e-9);
}

double truncated_block_loss_second_moment(long b, double cutoff) {
  check_cutoff(b, cutoff);
  return integrate([b](double y) { return second_moment_integrand(b, y); }, 0.0,
                   cutoff, 1e-9);
}

double truncated_total_rate(long b, double cutoff) {
  check_cutoff(b, cutoff);
  return integrate([b](double y) { return total_rate_integrand(b, y); }, 0.0, cutoff,
                   1e-9);
}

double total_rate_density(long b, double y) {
  if (b < 1 || !(y > 0.0) || y > 1.0)
    throw std::invalid_argument("total_rate_density: need b >= 1 and y in (0,1]");
  return total_rate_integrand(b, y);
}

RateTable::RateTable(long bm) : b_max(bm) {
  if (b_max < 2 || b_max > 2000)
    throw std::invalid_argument("RateTable: b_max out of range");
  rate.resize(size_t(b_max) + 1);
  tail.resize(size_t(b_max) + 1);
  total.assign(size_t(b_max) + 1, 0.0);
  loss.assign(size_t(b_max) + 1, 0.0);
  loss[1] = 0.0;
  for (long b = 2; b <= b_max; ++b) {
    rate[size_t(b)].assign(size_t(b) + 2, 0.0);
    tail[size_t(b)].assign(size_t(b) + 2, 0.0);
    for (long k = 2; k <= b; ++k) {
      rate[size_t(b)][size_t(k)] = merger_rate(b, k);
      tail[size_t(b)][size_t(k)] = merger_size_tail(b, k);
    }
    total[size_t(b)] = total_merger_rate(b);
    loss[size_t(b)] = block_loss_rate(b);
  }
}

}  // namespace bsz
