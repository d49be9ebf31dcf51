#pragma once

#include <optional>
#include <vector>

#include "bsz/block_path.hpp"
#include "bsz/partition.hpp"
#include "bsz/rng.hpp"

namespace bsz {

struct CoalescentOptions {
  bool labeled{false};          // track the partition, not just counts
  double horizon{-1.0};         // stop at this time if >= 0, else run to absorption
  bool keep_partitions{false};  // record the partition after every merger
};

struct CoalescentRun {
  BlockPath path;
  std::optional<Partition> final_partition;       // labeled mode
  std::vector<Partition> partition_history;       // labeled + keep_partitions
};

// Continuous-time block-counting chain started from n singleton blocks:
// holding rate b - 1, merger size K from merger_size_pmf, and in labeled
// mode a uniformly chosen K-subset of blocks merges.
CoalescentRun simulate_coalescent(long n, const CoalescentOptions& opt, rng& g);

// absorption time of a fresh n-block chain
double time_to_mrca(long n, rng& g);

// integral of the block count until absorption
double total_branch_length(long n, rng& g);

// One sample of the partition of {1..n} held at time t, built from the
// normalized jumps of a stable subordinator of index alpha = exp(-t):
// points above delta are realized ((alpha Gamma_i)^(-1/alpha) for a unit
// Poisson walk Gamma_i), the mass below delta enters the normalization
// through its mean delta^(1-alpha)/(1-alpha), and n uniform throws on the
// resulting subintervals group the labels.  delta <= 0 selects the cut
// adaptively so the mean carried by unrealized points stays below
// rel_dust_tol of the total.
struct PaintboxOptions {
  double delta{0.0};
  double rel_dust_tol{0.01};
};

struct PaintboxSample {
  Partition partition;
  double realized_mass{};  // sum of realized points
  double dust_mean{};      // analytic mean of the unrealized remainder
  bool dust_warning{};     // dust_mean above 1% of the normalizer
};

PaintboxSample paintbox_partition(long n, double t, rng& g,
                                  const PaintboxOptions& opt = {});

// E[number of blocks at time t] = Gamma(n + a) / (a Gamma(a) Gamma(n)) with
// a = exp(-t)
double expected_blocks(long n, double t);

}  // namespace bsz
