#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bsz/block_path.hpp"
#include "bsz/piecewise_path.hpp"
#include "bsz/rng.hpp"

namespace bsz {

enum class RescaleKind { mrca, blocks, length };

struct RescaleSpec {
  RescaleKind kind{};
  long n{};  // >= 3 so log log n is defined
};

// centered MRCA age: a - log log n
double rescale_mrca(long n, double a);
double unrescale_mrca(long n, double x);

// centered total branch length:
//   ((log n)^2 / n) (l - n/log n - n log log n/(log n)^2)
double rescale_length(long n, double l);
double unrescale_length(long n, double x);

// block-count fluctuation at path time t:
//   (log n / n) (raw - n e^{-t} - n t e^{-t} log log n / log n)
double rescale_blocks_value(long n, double t, double raw);
double unrescale_blocks_value(long n, double t, double x);

// whole-path map: an ancestor trace in age u becomes the fluctuation path in
// t = u log n, sampled on a uniform grid plus the trace's own jump times,
// cut at t_max
PiecewisePath rescale_block_path(long n, const BlockPath& trace, double t_max);

// sup distance between the empirical cdf of the samples and cdf
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);
double ks_statistic_two(std::vector<double> a, std::vector<double> b);
// p ~ 0.001 asymptotic thresholds
double ks_threshold(std::size_t m);
double ks_threshold_two(std::size_t m1, std::size_t m2);

struct CfEstimate {
  std::complex<double> value;
  double se_re{};
  double se_im{};
};

// mean of e^{iux} with componentwise standard errors
CfEstimate empirical_cf(const std::vector<double>& xs, double u);

struct TestReport {
  std::string name;
  double statistic{};
  double threshold{};
  bool pass{};
  long replicates{};
  std::uint64_t seed{};
};

std::string reports_to_json(const std::vector<TestReport>& reports);
std::string reports_to_csv(const std::vector<TestReport>& reports);

// One shared-field replicate: the population model and the truncated stable
// path are built from a single Poisson field, the population's block-count
// fluctuations X_n are compared with the stable limit path Y_n on [0, T].
struct CouplingResult {
  PiecewisePath x_path;
  PiecewisePath y_path;
  double sup_distance{};
  bool structure_ok{};       // shared jump-time plumbing holds bitwise
  long explicit_points{};    // field points realized individually
  long degenerate_points{};  // field points that touched fewer than two lines
};

CouplingResult run_coupling_experiment(long n, double t_window, rng& g);

// truncated variance rate against its closed-form envelope b^2 * cutoff at
// b in {n/10, n/2, n}
TestReport variance_rate_bound_check(long n);

// replicate counts and grids for the named suite tests; defaults carry the
// full acceptance scale, fast() a reduced smoke scale, and from_json_file
// reads either profile from a config file
struct VerifyConfig {
  long rate_b_max{500};
  long loss_b_max{100000};
  long depth_reps{10000};
  std::vector<long> depth_ns{10, 100, 1000};
  long blocks_reps{10000};
  std::vector<std::pair<long, double>> blocks_cases{
      {100, 0.5}, {1000, 0.5}, {1000, 1.0}};
  long equiv_n3_reps{20000};
  long equiv_n5_reps{10000};
  long equiv_a100_reps{4000};
  long gumbel_samples{100000};
  long gumbel_mc{40000};
  long balance_grid{50};
  long a_jumps{10000};
  std::vector<double> generator_xs{-1.0, 0.0, 2.0};
  double stable_eps{1e-6};
  long stable_samples{100000};
  std::vector<double> stable_us{0.5, 1.0, 2.0};
  std::vector<double> ou_zs{0.5, 1.0, 2.0};
  long ou_cf_samples{20000};
  double ou_cf_eps{1e-3};
  double ou_cf_tail{25.0};
  long ou_paths{20};
  double ou_h{1e-3};
  double ou_eps{1e-2};
  long coupling_reps{100};
  std::vector<long> coupling_grid{1000, 10000, 100000};
  long mrca_reps{10000};
  std::vector<long> mrca_grid{100, 1000, 10000};

  static VerifyConfig acceptance();
  static VerifyConfig fast();
  // profile is "acceptance" or "fast"; throws std::runtime_error on a
  // missing file or unknown profile
  static VerifyConfig from_json_file(const std::string& path,
                                     const std::string& profile);
};

// the named suite tests, in run order
const std::vector<std::string>& suite_names();

// run one named test; throws std::invalid_argument for an unknown name
TestReport run_one(const std::string& name, const VerifyConfig& cfg,
                   std::uint64_t seed);

std::vector<TestReport> run_suite(const std::vector<std::string>& names,
                                  const VerifyConfig& cfg, std::uint64_t seed);

}  // namespace bsz
