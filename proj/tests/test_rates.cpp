#include <cmath>
#include <stdexcept>
#include <vector>

#include "bsz/rates.hpp"
#include "bsz/rng.hpp"
#include "bsz/special.hpp"
#include "doctest.h"
#include "test_util.hpp"

namespace {
constexpr double kEuler = 0.57721566490153286;

// Pascal triangle row; exact in double for the b used here
std::vector<double> binom_row(long b) {
  std::vector<double> row(size_t(b) + 1, 0.0);
  row[0] = 1.0;
  for (long i = 1; i <= b; ++i)
    for (long j = i; j >= 1; --j) row[size_t(j)] += row[size_t(j) - 1];
  return row;
}
}  // namespace

TEST_CASE("merger rates at small sizes") {
  CHECK(bsz::merger_rate(2, 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bsz::merger_rate(3, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(bsz::merger_rate(3, 3) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(bsz::merger_rate(4, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(bsz::merger_rate(4, 3) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(bsz::merger_rate(4, 4) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS((void)bsz::merger_rate(3, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)bsz::merger_rate(3, 4), std::invalid_argument);
}

TEST_CASE("k(k-1) C(b,k) lambda(b,k) = b") {
  // exact binomials for moderate b
  for (long b : {2L, 5L, 20L, 50L}) {
    auto row = binom_row(b);
    for (long k = 2; k <= b; ++k) {
      double lhs = double(k) * double(k - 1) * row[size_t(k)] *
                   bsz::merger_rate(b, k);
      CHECK(lhs == doctest::Approx(double(b)).epsilon(1e-12));
    }
  }
  // log form beyond the product range
  for (long b : {100L, 200L, 500L, 1500L, 5000L}) {
    for (long k : {2L, 3L, b / 2, b - 1, b}) {
      double lhs = std::log(double(k)) + std::log(double(k - 1)) +
                   bsz::log_binom(b, k) + bsz::log_merger_rate(b, k);
      CHECK(lhs == doctest::Approx(std::log(double(b))).epsilon(1e-10));
    }
  }
}

TEST_CASE("total merger rate is b - 1") {
  for (long b : {2L, 3L, 10L, 100L, 500L}) {
    CHECK(bsz::total_merger_rate(b) ==
          doctest::Approx(double(b - 1)).epsilon(1e-12));
  }
  CHECK(bsz::total_merger_rate(2000) ==
        doctest::Approx(1999.0).epsilon(1e-9));
}

TEST_CASE("merger size pmf and tail") {
  CHECK(bsz::merger_size_pmf(3, 2) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(bsz::merger_size_pmf(3, 3) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(bsz::merger_size_tail(3, 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bsz::merger_size_tail(3, 3) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(bsz::merger_size_tail(3, 4) == 0.0);

  for (long b : {2L, 7L, 40L, 300L}) {
    double s = 0.0;
    for (long k = 2; k <= b; ++k) s += bsz::merger_size_pmf(b, k);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    for (long k = 2; k <= b; ++k) {
      CHECK(bsz::merger_size_tail(b, k) - bsz::merger_size_tail(b, k + 1) ==
            doctest::Approx(bsz::merger_size_pmf(b, k)).epsilon(1e-11));
    }
    CHECK(bsz::merger_size_tail(b, 2) == doctest::Approx(1.0).epsilon(1e-13));
  }

  // pmf consistent with the per-set rates
  for (long b : {3L, 6L, 12L}) {
    auto row = binom_row(b);
    for (long k = 2; k <= b; ++k) {
      double want = row[size_t(k)] * bsz::merger_rate(b, k) / double(b - 1);
      CHECK(bsz::merger_size_pmf(b, k) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("merger size sampler matches the pmf") {
  bsz::rng g(101);
  for (int i = 0; i < 1000; ++i) CHECK(bsz::sample_merger_size(2, g) == 2);

  const long b = 50, m = 1000000;
  std::vector<double> obs(size_t(b) + 1, 0.0), want(size_t(b) + 1, 0.0);
  for (long i = 0; i < m; ++i) {
    long k = bsz::sample_merger_size(b, g);
    REQUIRE(k >= 2);
    REQUIRE(k <= b);
    obs[size_t(k)] += 1.0;
  }
  for (long k = 2; k <= b; ++k)
    want[size_t(k)] = double(m) * bsz::merger_size_pmf(b, k);
  double x2 = testutil::chi2_stat({obs.begin() + 2, obs.end()},
                                  {want.begin() + 2, want.end()});
  CHECK(bsz::chi2_pvalue(double(b - 2), x2) > 1e-3);
}

TEST_CASE("merger size sampler mean at large b") {
  bsz::rng g(103);
  const long b = 1000, m = 1000000;
  std::vector<double> xs((size_t)m);
  for (long i = 0; i < m; ++i) xs[size_t(i)] = double(bsz::sample_merger_size(b, g));
  double want = double(b) * bsz::harmonic(b - 1) / double(b - 1);
  double se = std::sqrt(testutil::variance(xs) / double(m));
  CHECK(std::fabs(testutil::mean(xs) - want) < 4.0 * se);
}

TEST_CASE("block loss rate and its logarithmic approximation") {
  CHECK(bsz::block_loss_rate(1) == 0.0);
  CHECK(bsz::block_loss_rate(2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bsz::block_loss_rate(3) == doctest::Approx(2.5).epsilon(1e-14));
  for (long b = 2; b <= 2000; ++b) {
    double gap = bsz::block_loss_rate(b) -
                 double(b) * (std::log(double(b)) + kEuler - 1.0);
    CHECK(std::fabs(gap) <= 1.0);
  }
}

TEST_CASE("truncated block loss rate") {
  // two blocks: the integrand collapses to 1, so the value is the cutoff
  for (double c : {0.01, 0.3, 1.0}) {
    CHECK(bsz::truncated_block_loss_rate(2, c) ==
          doctest::Approx(c).epsilon(1e-11));
  }
  // full cutoff recovers b (H_b - 1)
  for (long b : {2L, 3L, 10L, 100L, 750L}) {
    CHECK(bsz::truncated_block_loss_rate(b, 1.0) ==
          doctest::Approx(bsz::block_loss_rate(b)).epsilon(1e-9));
  }
  // monotone in the cutoff
  CHECK(bsz::truncated_block_loss_rate(40, 0.2) <
        bsz::truncated_block_loss_rate(40, 0.6));
  // a single block loses nothing
  CHECK(std::fabs(bsz::truncated_block_loss_rate(1, 0.7)) < 1e-12);
  CHECK(std::fabs(bsz::truncated_block_loss_second_moment(1, 0.7)) < 1e-12);
  CHECK(std::fabs(bsz::truncated_total_rate(1, 0.7)) < 1e-12);
  CHECK_THROWS_AS((void)bsz::truncated_block_loss_rate(2, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)bsz::truncated_block_loss_rate(2, 1.5),
                  std::invalid_argument);
}

TEST_CASE("truncated loss tracks the logarithmic profile at scale") {
  // with b = n = 10^4 and the cutoff eps/log(n), eps = exp(-sqrt(log n)),
  // the truncated loss stays within (log n)/eps + 1 of
  // b (log b - log log n + log eps + gamma - 1)
  const double n = 1e4;
  const long b = 10000;
  double logn = std::log(n);
  double eps = std::exp(-std::sqrt(logn));
  double cutoff = eps / logn;
  double got = bsz::truncated_block_loss_rate(b, cutoff);
  double profile =
      double(b) * (std::log(double(b)) - std::log(logn) + std::log(eps) +
                   kEuler - 1.0);
  CHECK(std::fabs(got - profile) <= logn / eps + 1.0);
}

TEST_CASE("truncated second moment") {
  for (double c : {0.05, 0.5, 1.0}) {
    CHECK(bsz::truncated_block_loss_second_moment(2, c) ==
          doctest::Approx(c).epsilon(1e-11));
  }
  for (long b : {3L, 10L, 100L}) {
    for (double c : {0.1, 1.0}) {
      double v2 = bsz::truncated_block_loss_second_moment(b, c);
      CHECK(v2 >= bsz::truncated_block_loss_rate(b, c));
      CHECK(v2 <= double(b) * double(b) * c * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("truncated total rate") {
  for (double c : {0.02, 0.4, 1.0}) {
    CHECK(bsz::truncated_total_rate(2, c) == doctest::Approx(c).epsilon(1e-11));
  }
  for (long b : {2L, 3L, 10L, 100L, 750L}) {
    CHECK(bsz::truncated_total_rate(b, 1.0) ==
          doctest::Approx(double(b - 1)).epsilon(1e-9));
  }
  // the cutoff removes rate mass
  CHECK(bsz::truncated_total_rate(100, 0.01) < 99.0);
}

TEST_CASE("rate table agrees with the direct functions") {
  bsz::RateTable tab(64);
  for (long b : {2L, 5L, 31L, 64L}) {
    CHECK(tab.total[size_t(b)] ==
          doctest::Approx(bsz::total_merger_rate(b)).epsilon(1e-14));
    CHECK(tab.loss[size_t(b)] ==
          doctest::Approx(bsz::block_loss_rate(b)).epsilon(1e-14));
    CHECK(tab.tail[size_t(b)][2] == 1.0);
    for (long k = 2; k <= b; ++k) {
      CHECK(tab.lambda(b, k) ==
            doctest::Approx(bsz::merger_rate(b, k)).epsilon(1e-14));
      CHECK(tab.tail[size_t(b)][size_t(k)] >
            tab.tail[size_t(b)][size_t(k) + 1]);
      CHECK(tab.tail[size_t(b)][size_t(k)] ==
            doctest::Approx(bsz::merger_size_tail(b, k)).epsilon(1e-15));
    }
  }
  CHECK_THROWS_AS((void)bsz::RateTable(1), std::invalid_argument);
}
