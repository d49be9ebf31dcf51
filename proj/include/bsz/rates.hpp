#pragma once

#include <vector>

#include "bsz/rng.hpp"

namespace bsz {

// Rate at which a fixed set of k of the current b blocks merges:
//   lambda(b,k) = (k-2)! (b-k)! / (b-1)!  =  1 / ((b-1) C(b-2, k-2)).
// Exact product arithmetic while the inner binomial is representable,
// log-gamma form beyond.
double merger_rate(long b, long k);
double log_merger_rate(long b, long k);

// sum over k of C(b,k) lambda(b,k); equals b - 1
double total_merger_rate(long b);

// distribution of the size K of the next merger: P(K = k) = b/((b-1) k (k-1))
double merger_size_pmf(long b, long k);

// P(K >= k) = (b/(k-1) - 1)/(b-1); closed form enables O(1) inverse sampling
double merger_size_tail(long b, long k);
long sample_merger_size(long b, rng& g);

// expected number of blocks lost per unit time from b blocks:
//   eta(b) = sum_k (k-1) C(b,k) lambda(b,k) = b (H_b - 1)
double block_loss_rate(long b);

// same quantity when only merger events driven by marks below `cutoff`
// are kept: integral over (0, cutoff] of (b y - 1 + (1-y)^b) / y^2
double truncated_block_loss_rate(long b, double cutoff);

// second-moment analogue, sum (k-1)^2 against the truncated rates:
// integral over (0, cutoff] of (b y (1-y) + (b y - 1)^2 - (1-y)^b) / y^2
double truncated_block_loss_second_moment(long b, double cutoff);

// total truncated merger rate: integral over (0, cutoff] of
// (1 - (1-y)^b - b y (1-y)^{b-1}) / y^2
double truncated_total_rate(long b, double cutoff);

// the integrand above: P(Binomial(b, y) >= 2) / y^2, the density in the mark
// of merger events among b individuals
double total_rate_density(long b, double y);

// cached rate family for b up to b_max
struct RateTable {
  long b_max{};
  std::vector<std::vector<double>> rate;  // rate[b][k], 2 <= k <= b
  std::vector<std::vector<double>> tail;  // tail[b][k] = P(K >= k)
  std::vector<double> total;              // total[b]
  std::vector<double> loss;               // loss[b]

  explicit RateTable(long b_max);
  double lambda(long b, long k) const { return rate[size_t(b)][size_t(k)]; }
};

}  // namespace bsz
