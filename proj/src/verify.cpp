#include "bsz/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

#include "bsz/coalescent.hpp"
#include "bsz/csv.hpp"
#include "bsz/pdmp.hpp"
#include "bsz/population.hpp"
#include "bsz/rates.hpp"
#include "bsz/special.hpp"
#include "bsz/stable.hpp"
#include "bsz/tree.hpp"

namespace bsz {

namespace {

void check_n(long n) {
  if (n < 3) throw std::domain_error("rescale: need n >= 3");
}

double loglog(long n) { return std::log(std::log(double(n))); }

double gumbel_cdf(double y) { return std::exp(-std::exp(-y)); }

// sub-seed derivation: every test, case, and replicate owns a stream keyed
// only by indices, so run order and worker count never matter
uint64_t mix(uint64_t a, uint64_t b) {
  uint64_t s = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  return splitmix64(s);
}

}  // namespace

double rescale_mrca(long n, double a) {
  check_n(n);
  return a - loglog(n);
}

double unrescale_mrca(long n, double x) {
  check_n(n);
  return x + loglog(n);
}

double rescale_length(long n, double l) {
  check_n(n);
  double ln = std::log(double(n));
  return (ln * ln / double(n)) *
         (l - double(n) / ln - double(n) * loglog(n) / (ln * ln));
}

double unrescale_length(long n, double x) {
  check_n(n);
  double ln = std::log(double(n));
  return x * double(n) / (ln * ln) + double(n) / ln +
         double(n) * loglog(n) / (ln * ln);
}

double rescale_blocks_value(long n, double t, double raw) {
  check_n(n);
  double ln = std::log(double(n));
  double w = std::exp(-t);
  return (ln / double(n)) *
         (raw - double(n) * w - double(n) * t * w * loglog(n) / ln);
}

double unrescale_blocks_value(long n, double t, double x) {
  check_n(n);
  double ln = std::log(double(n));
  double w = std::exp(-t);
  return x * double(n) / ln + double(n) * w + double(n) * t * w * loglog(n) / ln;
}

PiecewisePath rescale_block_path(long n, const BlockPath& trace, double t_max) {
  check_n(n);
  if (!(t_max > 0.0))
    throw std::invalid_argument("rescale_block_path: window not positive");
  if (trace.events.empty() || trace.events.front().time != 0.0)
    throw std::invalid_argument("rescale_block_path: trace must start at age 0");
  double ln = std::log(double(n));
  const int cells = 256;
  PiecewisePath out;
  size_t j = 1;
  long c = trace.events.front().block_count;
  for (int k = 0; k <= cells; ++k) {
    double tg = t_max * double(k) / double(cells);
    bool covered = false;
    while (j < trace.events.size() && trace.events[j].time * ln <= tg) {
      double tj = trace.events[j].time * ln;
      out.add(tj, rescale_blocks_value(n, tj, double(c)));
      c = trace.events[j].block_count;
      out.add(tj, rescale_blocks_value(n, tj, double(c)), true);
      if (tj == tg) covered = true;
      ++j;
    }
    if (!covered) out.add(tg, rescale_blocks_value(n, tg, double(c)));
  }
  return out;
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: no samples");
  std::sort(samples.begin(), samples.end());
  double m = double(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    double f = cdf(samples[i]);
    d = std::max(d, std::fabs(f - double(i) / m));
    d = std::max(d, std::fabs(double(i + 1) / m - f));
  }
  return d;
}

double ks_statistic_two(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_statistic_two: no samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    // consume ties on both sides before reading the gap
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(double(i) / double(a.size()) -
                              double(j) / double(b.size())));
  }
  return d;
}

double ks_threshold(std::size_t m) { return 1.95 / std::sqrt(double(m)); }

double ks_threshold_two(std::size_t m1, std::size_t m2) {
  return 1.95 * std::sqrt(double(m1 + m2) / (double(m1) * double(m2)));
}

CfEstimate empirical_cf(const std::vector<double>& xs, double u) {
  if (xs.empty()) throw std::invalid_argument("empirical_cf: no samples");
  double sr = 0.0, si = 0.0, sr2 = 0.0, si2 = 0.0;
  for (double x : xs) {
    double c = std::cos(u * x);
    double s = std::sin(u * x);
    sr += c;
    si += s;
    sr2 += c * c;
    si2 += s * s;
  }
  double m = double(xs.size());
  double mr = sr / m;
  double mi = si / m;
  CfEstimate e;
  e.value = {mr, mi};
  if (xs.size() > 1) {
    double vr = (sr2 - m * mr * mr) / (m - 1.0);
    double vi = (si2 - m * mi * mi) / (m - 1.0);
    e.se_re = std::sqrt(std::max(vr, 0.0) / m);
    e.se_im = std::sqrt(std::max(vi, 0.0) / m);
  }
  return e;
}

std::string reports_to_json(const std::vector<TestReport>& reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json o;
    o["name"] = r.name;
    o["statistic"] = r.statistic;
    o["threshold"] = r.threshold;
    o["pass"] = r.pass;
    o["replicates"] = r.replicates;
    o["seed"] = r.seed;
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

std::string reports_to_csv(const std::vector<TestReport>& reports) {
  std::string out = "name,statistic,threshold,pass,replicates,seed\n";
  for (const auto& r : reports) {
    out += r.name;
    out += ',';
    out += fmt_double(r.statistic);
    out += ',';
    out += fmt_double(r.threshold);
    out += ',';
    out += r.pass ? '1' : '0';
    out += ',';
    out += fmt_int(r.replicates);
    out += ',';
    out += std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

CouplingResult run_coupling_experiment(long n, double t_window, rng& g) {
  if (n < 100)
    throw std::invalid_argument("run_coupling_experiment: need n >= 100");
  if (!(t_window > 0.0))
    throw std::invalid_argument("run_coupling_experiment: window not positive");
  double ln = std::log(double(n));
  double eps_n = coupling_eps(n);
  double cutoff = default_cutoff(n);

  // one Poisson field drives both sides; marks above log n are dropped on
  // both (on the population side a mark is a participation probability at
  // scale 1/log n, so larger marks cannot act)
  PointField psi = simulate_psi(0.0, t_window, 0.9 * eps_n, ln, g);

  // the stable side keeps exactly the points the population realizes
  // explicitly; the selection applies the simulator's own predicate to the
  // same doubles so the jump-time sets agree bitwise
  StablePath sn;
  sn.eps = 0.9 * eps_n;  // lower bound on stored jump sizes
  sn.t0 = 0.0;
  sn.t1 = t_window;
  sn.drift = stable_drift(eps_n);  // compensation at the true truncation
  std::vector<double> expected_theta;
  for (const auto& p : psi.points) {
    if (p.y / ln > cutoff) {
      sn.jumps.push_back({p.t, p.y});
      expected_theta.push_back(-p.t / ln);
    }
  }
  std::sort(expected_theta.begin(), expected_theta.end());

  EventLog log = simulate_population_coupled(n, psi, cutoff, g);

  std::vector<double> realized;
  for (const auto& e : log.events)
    if (e.from_field) realized.push_back(e.time);

  CouplingResult res;
  res.explicit_points = (long)expected_theta.size();
  res.degenerate_points = (long)(expected_theta.size() - realized.size());
  res.structure_ok = std::includes(expected_theta.begin(), expected_theta.end(),
                                   realized.begin(), realized.end());

  const int cells = 512;
  std::vector<double> grid(cells + 1);
  for (int k = 0; k <= cells; ++k) grid[k] = t_window * double(k) / double(cells);

  res.y_path = limit_block_path(sn, grid);
  {
    // the limit path must carry the shared jump times through unchanged
    std::vector<double> yj = res.y_path.jump_times();
    std::vector<double> yj_theta(yj.size());
    for (size_t i = 0; i < yj.size(); ++i) yj_theta[i] = -yj[i] / ln;
    std::sort(yj_theta.begin(), yj_theta.end());
    res.structure_ok = res.structure_ok && yj_theta == expected_theta;
  }

  BlockPath trace = ancestor_trace(log, 0.0, t_window / ln);

  // merged sweep over both jump sets; a cluster groups floating-point twins
  // of one shared field time so the sup never straddles a half-applied jump
  struct Tick {
    double t{};
    bool stable{};  // false: population trace event, true: stable jump
    double y{};
    long count{};
  };
  std::vector<Tick> ticks;
  ticks.reserve(trace.events.size() + sn.jumps.size());
  for (size_t j = 1; j < trace.events.size(); ++j)
    ticks.push_back(
        {trace.events[j].time * ln, false, 0.0, trace.events[j].block_count});
  for (const auto& jmp : sn.jumps) ticks.push_back({jmp.t, true, jmp.x, 0});
  std::sort(ticks.begin(), ticks.end(), [](const Tick& a, const Tick& b) {
    if (a.t != b.t) return a.t < b.t;
    return int(a.stable) < int(b.stable);
  });

  long c = n;
  double jsum = 0.0;
  double sup = 0.0;
  auto xval = [&](double t, long cnt) {
    return rescale_blocks_value(n, t, double(cnt));
  };
  auto yval = [&](double t, double js) {
    double w = std::exp(-t);
    return w * (sn.drift * t - js) + 0.5 * w * t * t;
  };
  const double cluster = 1e-9;
  size_t i = 0, gi = 0;
  res.x_path.add(0.0, xval(0.0, c));
  while (gi < grid.size() || i < ticks.size()) {
    double tg = gi < grid.size() ? grid[gi]
                                 : std::numeric_limits<double>::infinity();
    double tt = i < ticks.size() ? ticks[i].t
                                 : std::numeric_limits<double>::infinity();
    if (tg < tt - cluster) {
      sup = std::max(sup, std::fabs(xval(tg, c) - yval(tg, jsum)));
      if (gi > 0) res.x_path.add(tg, xval(tg, c));
      ++gi;
      continue;
    }
    double t0c = tt;
    sup = std::max(sup, std::fabs(xval(t0c, c) - yval(t0c, jsum)));
    long c_before = c;
    double tend = tt;
    while (i < ticks.size() && ticks[i].t <= tend + cluster) {
      if (ticks[i].stable)
        jsum += ticks[i].y;
      else
        c = ticks[i].count;
      tend = std::max(tend, ticks[i].t);
      ++i;
    }
    while (gi < grid.size() && grid[gi] <= tend + cluster) ++gi;
    sup = std::max(sup, std::fabs(xval(t0c, c) - yval(t0c, jsum)));
    if (c != c_before) {
      res.x_path.add(t0c, xval(t0c, c_before));
      res.x_path.add(t0c, xval(t0c, c), true);
    }
  }
  res.sup_distance = sup;
  return res;
}

TestReport variance_rate_bound_check(long n) {
  if (n < 100)
    throw std::invalid_argument("variance_rate_bound_check: need n >= 100");
  double cutoff = default_cutoff(n);
  double worst = 0.0;
  for (long b : {n / 10, n / 2, n}) {
    double v = truncated_block_loss_second_moment(b, cutoff);
    double bound = double(b) * double(b) * cutoff;
    worst = std::max(worst, v / bound);
  }
  return {"variance_rate_bound", worst, 1.0, worst <= 1.0, 3, 0};
}

namespace {

// binomial row by running product; representable through b ~ 1000
std::vector<double> binom_row(long b) {
  std::vector<double> row((size_t)b + 1, 1.0);
  for (long k = 1; k <= b; ++k)
    row[(size_t)k] = row[(size_t)k - 1] * double(b - k + 1) / double(k);
  return row;
}

double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  size_t m = xs.size();
  if (m % 2 == 1) return xs[m / 2];
  return 0.5 * (xs[m / 2 - 1] + xs[m / 2]);
}

struct moments {
  double s = 0.0, s2 = 0.0;
  long m = 0;
  void add(double x) {
    s += x;
    s2 += x * x;
    ++m;
  }
  double mean() const { return s / double(m); }
  double se() const {
    double mu = mean();
    double var = (s2 - double(m) * mu * mu) / double(m - 1);
    return std::sqrt(std::max(var, 0.0) / double(m));
  }
};

// homogeneity chi-square p-value for two count vectors over shared bins
double homogeneity_pvalue(const std::vector<long>& xs, const std::vector<long>& ys) {
  double nx = 0.0, ny = 0.0;
  for (long v : xs) nx += double(v);
  for (long v : ys) ny += double(v);
  double total = nx + ny;
  double stat = 0.0;
  long used = 0;
  for (size_t k = 0; k < xs.size(); ++k) {
    double pooled = double(xs[k] + ys[k]);
    if (pooled == 0.0) continue;
    ++used;
    double ex = pooled * nx / total;
    double ey = pooled * ny / total;
    stat += (double(xs[k]) - ex) * (double(xs[k]) - ex) / ex;
    stat += (double(ys[k]) - ey) * (double(ys[k]) - ey) / ey;
  }
  return chi2_pvalue(double(used - 1), stat);
}

double chi2_two_cell_pvalue(long hits, long m, double p) {
  double e1 = double(m) * p;
  double e2 = double(m) * (1.0 - p);
  double d1 = double(hits) - e1;
  double d2 = double(m - hits) - e2;
  double stat = d1 * d1 / e1 + d2 * d2 / e2;
  return chi2_pvalue(1.0, stat);
}

TestReport t_rate_identities(const VerifyConfig& cfg, uint64_t seed, uint64_t) {
  double worst = 0.0;
  long checks = 0;
  for (long b = 2; b <= cfg.rate_b_max; ++b) {
    worst = std::max(worst, std::fabs(total_merger_rate(b) - double(b - 1)) /
                                double(b - 1));
    ++checks;
    auto row = binom_row(b);
    for (long k = 2; k <= b; ++k) {
      double lhs = row[(size_t)k] * merger_rate(b, k);
      double rhs = double(b) / (double(k) * double(k - 1));
      worst = std::max(worst, std::fabs(lhs - rhs) / rhs);
      ++checks;
    }
  }
  return {"rate_identities", worst, 1e-12, worst < 1e-12, checks, seed};
}

TestReport t_block_loss_bound(const VerifyConfig& cfg, uint64_t seed, uint64_t) {
  double worst = 0.0;
  for (long b = 2; b <= cfg.loss_b_max; ++b) {
    double approx = double(b) * (std::log(double(b)) + std::numbers::egamma - 1.0);
    worst = std::max(worst, std::fabs(block_loss_rate(b) - approx));
  }
  return {"block_loss_bound", worst, 1.0, worst <= 1.0, cfg.loss_b_max - 1, seed};
}

TestReport t_depth_mean(const VerifyConfig& cfg, uint64_t seed, uint64_t tseed) {
  double worst = 0.0;
  for (size_t i = 0; i < cfg.depth_ns.size(); ++i) {
    long n = cfg.depth_ns[i];
    double target = double(n) * (harmonic(n) - 1.0);
    moments mo;
    for (long r = 0; r < cfg.depth_reps; ++r) {
      rng g = rng::stream(mix(tseed, i), (uint64_t)r);
      mo.add(double(depth_sum(build_rrt(n, g))));
    }
    worst = std::max(worst, std::fabs(mo.mean() - target) / (3.0 * mo.se()));
  }
  return {"depth_mean", worst, 1.0, worst <= 1.0,
          cfg.depth_reps * (long)cfg.depth_ns.size(), seed};
}

TestReport t_expected_blocks(const VerifyConfig& cfg, uint64_t seed,
                             uint64_t tseed) {
  double worst = 0.0;
  for (size_t i = 0; i < cfg.blocks_cases.size(); ++i) {
    auto [n, t] = cfg.blocks_cases[i];
    double target = expected_blocks(n, t);
    CoalescentOptions opt;
    opt.horizon = t;
    moments mo;
    for (long r = 0; r < cfg.blocks_reps; ++r) {
      rng g = rng::stream(mix(tseed, i), (uint64_t)r);
      mo.add(double(simulate_coalescent(n, opt, g).path.count_at(t)));
    }
    worst = std::max(worst, std::fabs(mo.mean() - target) / (3.0 * mo.se()));
  }
  return {"expected_blocks_gamma", worst, 1.0, worst <= 1.0,
          cfg.blocks_reps * (long)cfg.blocks_cases.size(), seed};
}

TestReport t_equivalence(const VerifyConfig& cfg, uint64_t seed, uint64_t tseed) {
  // first merger size at n=3: the chain and the cutting construction both
  // put mass {3/4, 1/4} on sizes {2, 3}
  long chain_pairs = 0, tree_pairs = 0;
  for (long r = 0; r < cfg.equiv_n3_reps; ++r) {
    rng g = rng::stream(mix(tseed, 0), (uint64_t)r);
    chain_pairs += sample_merger_size(3, g) == 2 ? 1 : 0;
    BlockPath bp = coalescent_from_rrt(3, g);
    tree_pairs += bp.events.at(1).merger_size.value() == 2 ? 1 : 0;
  }
  double p1 = chi2_two_cell_pvalue(chain_pairs, cfg.equiv_n3_reps, 0.75);
  double p2 = chi2_two_cell_pvalue(tree_pairs, cfg.equiv_n3_reps, 0.75);

  // N_5(1/2) marginal: paintbox throws against the rate chain
  std::vector<long> pb(6, 0), ch(6, 0);
  CoalescentOptions opt;
  opt.horizon = 0.5;
  for (long r = 0; r < cfg.equiv_n5_reps; ++r) {
    rng g = rng::stream(mix(tseed, 1), (uint64_t)r);
    pb[(size_t)paintbox_partition(5, 0.5, g).partition.block_count()] += 1;
    ch[(size_t)simulate_coalescent(5, opt, g).path.count_at(0.5)] += 1;
  }
  double p3 = homogeneity_pvalue(pb, ch);

  // MRCA age at n=100: population genealogy against the rate chain
  std::vector<double> pop((size_t)cfg.equiv_a100_reps),
      chain((size_t)cfg.equiv_a100_reps);
  for (long r = 0; r < cfg.equiv_a100_reps; ++r) {
    rng g = rng::stream(mix(tseed, 2), (uint64_t)r);
    pop[(size_t)r] = sample_genealogy(100, 0.0, g).a;
    chain[(size_t)r] = time_to_mrca(100, g);
  }
  double d = ks_statistic_two(pop, chain);
  double m = double(cfg.equiv_a100_reps);
  double p4 = kolmogorov_q(std::sqrt(m / 2.0) * d);

  double stat = std::min(std::min(p1, p2), std::min(p3, p4));
  return {"construction_equivalence", stat, 0.001, stat > 0.001,
          2 * cfg.equiv_n3_reps + 2 * cfg.equiv_n5_reps + 2 * cfg.equiv_a100_reps,
          seed};
}

TestReport t_gumbel(const VerifyConfig& cfg, uint64_t seed, uint64_t tseed) {
  double worst = 0.0;

  // stationary start propagated through the dynamics must stay stationary
  std::vector<double> xs((size_t)cfg.gumbel_samples);
  for (long r = 0; r < cfg.gumbel_samples; ++r) {
    rng g = rng::stream(mix(tseed, 0), (uint64_t)r);
    xs[(size_t)r] = simulate_r(0.0, 3.0, std::nullopt, g).samples.back().value;
  }
  double d = ks_statistic(std::move(xs), gumbel_cdf);
  worst = std::max(worst, d / ks_threshold((size_t)cfg.gumbel_samples));

  // transition law from x = 1 at t = 1/2: atom plus 20 cdf grid points
  const double x0 = 1.0, tt = 0.5;
  std::vector<double> ys((size_t)cfg.gumbel_mc);
  long at_floor = 0;
  const double floor_v = x0 - tt;
  for (long r = 0; r < cfg.gumbel_mc; ++r) {
    rng g = rng::stream(mix(tseed, 1), (uint64_t)r);
    double v = simulate_r(0.0, tt, x0, g).samples.back().value;
    ys[(size_t)r] = v;
    at_floor += v == floor_v ? 1 : 0;
  }
  double m = double(cfg.gumbel_mc);
  double atom = transition_atom_r(x0, tt);
  double se_atom = std::sqrt(atom * (1.0 - atom) / m);
  worst = std::max(worst, std::fabs(double(at_floor) / m - atom) / (3.0 * se_atom));
  std::sort(ys.begin(), ys.end());
  for (int j = 0; j < 20; ++j) {
    double y = floor_v + 0.05 + 3.5 * double(j) / 19.0;
    double f = transition_cdf_r(x0, tt, y);
    double emp = double(std::upper_bound(ys.begin(), ys.end(), y) - ys.begin()) / m;
    double se = std::sqrt(f * (1.0 - f) / m);
    worst = std::max(worst, std::fabs(emp - f) / (3.0 * se));
  }
  return {"gumbel_stationarity", worst, 1.0, worst <= 1.0,
          cfg.gumbel_samples + cfg.gumbel_mc, seed};
}

TestReport t_detailed_balance(const VerifyConfig& cfg, uint64_t seed, uint64_t) {
  auto pi = [](double y) { return std::exp(-y) * std::exp(-std::exp(-y)); };
  long gpts = cfg.balance_grid;
  double worst = 0.0;
  for (long ix = 0; ix < gpts; ++ix) {
    double x = -3.0 + 8.0 * double(ix) / double(gpts - 1);
    for (long iy = 0; iy < gpts; ++iy) {
      double y = -3.0 + 8.0 * double(iy) / double(gpts - 1);
      if (y < x) continue;
      double lhs = pi(x) * std::exp(-y);
      double rhs = pi(y) * std::exp(std::exp(-y) - std::exp(-x) - x);
      worst = std::max(worst, std::fabs(lhs - rhs));
    }
  }
  return {"detailed_balance", worst, 1e-12, worst < 1e-12, gpts * gpts, seed};
}

TestReport t_a_process(const VerifyConfig& cfg, uint64_t seed, uint64_t tseed) {
  double worst = 0.0;

  // inter-jump gaps on one long stationary path
  rng g = rng::stream(mix(tseed, 0), 0);
  PiecewisePath path =
      simulate_a(0.0, double(cfg.a_jumps) + 200.0, std::nullopt, g);
  std::vector<double> jt = path.jump_times();
  moments gaps;
  double prev = 0.0;
  for (size_t i = 0; i < jt.size() && (long)gaps.m < cfg.a_jumps; ++i) {
    gaps.add(jt[i] - prev);
    prev = jt[i];
  }
  worst = std::max(worst, std::fabs(gaps.mean() - 1.0) / (3.0 * gaps.se()));

  // jump-target law from level 0 at 10 cdf grid points
  std::vector<double> ts((size_t)cfg.a_jumps);
  for (long r = 0; r < cfg.a_jumps; ++r) {
    rng gr = rng::stream(mix(tseed, 1), (uint64_t)r);
    ts[(size_t)r] = pdmp_a_jump_target(0.0, gr);
  }
  std::sort(ts.begin(), ts.end());
  double m = double(cfg.a_jumps);
  for (int j = 0; j < 10; ++j) {
    double y = -2.0 + 1.95 * double(j) / 9.0;
    double f = std::exp(1.0 - std::exp(-y));
    double emp = double(std::upper_bound(ts.begin(), ts.end(), y) - ts.begin()) / m;
    double se = std::sqrt(f * (1.0 - f) / m);
    worst = std::max(worst, std::fabs(emp - f) / (3.0 * se));
  }
  return {"a_process_laws", worst, 1.0, worst <= 1.0, 2 * cfg.a_jumps, seed};
}

TestReport t_generator(const VerifyConfig& cfg, uint64_t seed, uint64_t) {
  auto f1 = [](double z) { return std::exp(-std::exp(-z)); };
  auto f2 = [](double z) { return std::exp(-std::exp(-(z - 1.0))); };
  const double hs[3] = {0.1, 0.01, 0.001};
  double worst = 0.0;
  for (int fi = 0; fi < 2; ++fi) {
    std::function<double(double)> f = fi == 0 ? std::function<double(double)>(f1)
                                              : std::function<double(double)>(f2);
    for (double x : cfg.generator_xs) {
      double af = generator_apply(f, x);
      double err[3];
      for (int hi = 0; hi < 3; ++hi)
        err[hi] = std::fabs((semigroup_apply(f, x, hs[hi]) - f(x)) / hs[hi] - af);
      worst = std::max(worst, err[1] / err[0]);
      worst = std::max(worst, err[2] / err[1]);
    }
  }
  return {"generator_consistency", worst, 0.3, worst <= 0.3,
          (long)(6 * cfg.generator_xs.size()), seed};
}

TestReport t_stable_cf(const VerifyConfig& cfg, uint64_t seed, uint64_t tseed) {
  std::vector<double> xs = stable_marginal_batch(cfg.stable_eps, 1.0,
                                                 mix(tseed, 0),
                                                 (size_t)cfg.stable_samples);
  double worst = 0.0;
  for (double u : cfg.stable_us) {
    CfEstimate e = empirical_cf(xs, u);
    double mod = std::exp(-0.5 * std::numbers::pi * u);
    double arg = u * std::log(u);
    worst = std::max(worst,
                     std::fabs(e.value.real() - mod * std::cos(arg)) / (3.0 * e.se_re));
    worst = std::max(worst,
                     std::fabs(e.value.imag() - mod * std::sin(arg)) / (3.0 * e.se_im));
  }
  return {"stable_cf", worst, 1.0, worst <= 1.0, cfg.stable_samples, seed};
}

TestReport t_ou_stationary(const VerifyConfig& cfg, uint64_t seed, uint64_t tseed) {
  double worst = 0.0;
  OuTypeSpec spec = ou_length_spec();
  for (double z : cfg.ou_zs)
    worst = std::max(worst, std::fabs(ou_rho_tail(spec, z) - 1.0 / z) / 1e-8);

  std::vector<double> xs((size_t)cfg.ou_cf_samples);
  for (long r = 0; r < cfg.ou_cf_samples; ++r) {
    rng g = rng::stream(mix(tseed, 0), (uint64_t)r);
    xs[(size_t)r] = ou_marginal_sample(cfg.ou_cf_eps, cfg.ou_cf_tail, g);
  }
  CfEstimate e = empirical_cf(xs, 1.0);
  double re = e.value.real(), im = e.value.imag();
  double mod = std::hypot(re, im);
  double se_mod =
      std::sqrt(re * re * e.se_re * e.se_re + im * im * e.se_im * e.se_im) / mod;
  double target = std::exp(-0.5 * std::numbers::pi);
  worst = std::max(worst, std::fabs(mod - target) / (3.0 * se_mod));
  return {"ou_stationary", worst, 1.0, worst <= 1.0, cfg.ou_cf_samples, seed};
}

TestReport t_ou_pathwise(const VerifyConfig& cfg, uint64_t seed, uint64_t tseed) {
  std::vector<double> grid;
  for (long k = 0; k * cfg.ou_h <= 1.0 + 1e-12; ++k) grid.push_back(double(k) * cfg.ou_h);
  double worst = 0.0;
  for (long r = 0; r < cfg.ou_paths; ++r) {
    rng g = rng::stream(mix(tseed, 0), (uint64_t)r);
    StablePath p = simulate_stable_window(cfg.ou_eps, -1.2, 41.0, g);
    worst = std::max(worst, ou_pathwise_residual(p, grid));
  }
  return {"ou_pathwise", worst, 1e-4, worst < 1e-4, cfg.ou_paths, seed};
}

TestReport t_coupling_trend(const VerifyConfig& cfg, uint64_t seed, uint64_t tseed) {
  std::vector<double> meds;
  bool structure = true;
  for (size_t i = 0; i < cfg.coupling_grid.size(); ++i) {
    long n = cfg.coupling_grid[i];
    double tn = 2.0 * loglog(n);
    std::vector<double> sups((size_t)cfg.coupling_reps);
    for (long r = 0; r < cfg.coupling_reps; ++r) {
      rng g = rng::stream(mix(tseed, i), (uint64_t)r);
      CouplingResult cr = run_coupling_experiment(n, tn, g);
      sups[(size_t)r] = cr.sup_distance;
      structure = structure && cr.structure_ok;
    }
    meds.push_back(median_of(std::move(sups)));
  }
  double stat = 0.0;
  for (size_t i = 1; i < meds.size(); ++i)
    stat = std::max(stat, meds[i] - meds[i - 1]);
  if (!structure) stat = std::numeric_limits<double>::max();
  return {"coupling_trend", stat, 0.0, stat <= 0.0,
          cfg.coupling_reps * (long)cfg.coupling_grid.size(), seed};
}

TestReport t_mrca_trend(const VerifyConfig& cfg, uint64_t seed, uint64_t tseed) {
  std::vector<double> ks;
  for (size_t i = 0; i < cfg.mrca_grid.size(); ++i) {
    long n = cfg.mrca_grid[i];
    std::vector<double> xs((size_t)cfg.mrca_reps);
    for (long r = 0; r < cfg.mrca_reps; ++r) {
      rng g = rng::stream(mix(tseed, i), (uint64_t)r);
      xs[(size_t)r] = rescale_mrca(n, time_to_mrca(n, g));
    }
    ks.push_back(ks_statistic(std::move(xs), gumbel_cdf));
  }
  double stat = 0.0;
  for (size_t i = 1; i < ks.size(); ++i)
    stat = std::max(stat, ks[i] - ks[i - 1]);
  return {"mrca_trend", stat, 0.0, stat <= 0.0,
          cfg.mrca_reps * (long)cfg.mrca_grid.size(), seed};
}

using test_fn = TestReport (*)(const VerifyConfig&, uint64_t, uint64_t);

const std::vector<std::pair<std::string, test_fn>>& registry() {
  static const std::vector<std::pair<std::string, test_fn>> reg = {
      {"rate_identities", t_rate_identities},
      {"block_loss_bound", t_block_loss_bound},
      {"depth_mean", t_depth_mean},
      {"expected_blocks_gamma", t_expected_blocks},
      {"construction_equivalence", t_equivalence},
      {"gumbel_stationarity", t_gumbel},
      {"detailed_balance", t_detailed_balance},
      {"a_process_laws", t_a_process},
      {"generator_consistency", t_generator},
      {"stable_cf", t_stable_cf},
      {"ou_stationary", t_ou_stationary},
      {"ou_pathwise", t_ou_pathwise},
      {"coupling_trend", t_coupling_trend},
      {"mrca_trend", t_mrca_trend},
  };
  return reg;
}

}  // namespace

VerifyConfig VerifyConfig::acceptance() { return {}; }

VerifyConfig VerifyConfig::fast() {
  VerifyConfig c;
  c.rate_b_max = 200;
  c.loss_b_max = 20000;
  c.depth_reps = 2000;
  c.depth_ns = {10, 100};
  c.blocks_reps = 2000;
  c.blocks_cases = {{100, 0.5}, {300, 1.0}};
  c.equiv_n3_reps = 4000;
  c.equiv_n5_reps = 2000;
  c.equiv_a100_reps = 800;
  c.gumbel_samples = 20000;
  c.gumbel_mc = 8000;
  c.a_jumps = 2000;
  c.stable_eps = 1e-4;
  c.stable_samples = 20000;
  c.ou_cf_samples = 4000;
  c.ou_cf_eps = 5e-3;
  c.ou_paths = 5;
  c.coupling_reps = 30;
  c.coupling_grid = {1000, 10000};
  c.mrca_reps = 2000;
  c.mrca_grid = {100, 1000};
  return c;
}

VerifyConfig VerifyConfig::from_json_file(const std::string& path,
                                          const std::string& profile) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("verify config not readable: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  if (!j.contains(profile))
    throw std::runtime_error("verify config has no profile: " + profile);
  VerifyConfig c = profile == "fast" ? fast() : acceptance();
  const auto& p = j.at(profile);
  auto geti = [&](const char* k, long& v) {
    if (p.contains(k)) v = p.at(k).get<long>();
  };
  auto getd = [&](const char* k, double& v) {
    if (p.contains(k)) v = p.at(k).get<double>();
  };
  auto getvl = [&](const char* k, std::vector<long>& v) {
    if (p.contains(k)) v = p.at(k).get<std::vector<long>>();
  };
  auto getvd = [&](const char* k, std::vector<double>& v) {
    if (p.contains(k)) v = p.at(k).get<std::vector<double>>();
  };
  geti("rate_b_max", c.rate_b_max);
  geti("loss_b_max", c.loss_b_max);
  geti("depth_reps", c.depth_reps);
  getvl("depth_ns", c.depth_ns);
  geti("blocks_reps", c.blocks_reps);
  if (p.contains("blocks_cases")) {
    c.blocks_cases.clear();
    for (const auto& e : p.at("blocks_cases"))
      c.blocks_cases.emplace_back(e.at(0).get<long>(), e.at(1).get<double>());
  }
  geti("equiv_n3_reps", c.equiv_n3_reps);
  geti("equiv_n5_reps", c.equiv_n5_reps);
  geti("equiv_a100_reps", c.equiv_a100_reps);
  geti("gumbel_samples", c.gumbel_samples);
  geti("gumbel_mc", c.gumbel_mc);
  geti("balance_grid", c.balance_grid);
  geti("a_jumps", c.a_jumps);
  getvd("generator_xs", c.generator_xs);
  getd("stable_eps", c.stable_eps);
  geti("stable_samples", c.stable_samples);
  getvd("stable_us", c.stable_us);
  getvd("ou_zs", c.ou_zs);
  geti("ou_cf_samples", c.ou_cf_samples);
  getd("ou_cf_eps", c.ou_cf_eps);
  getd("ou_cf_tail", c.ou_cf_tail);
  geti("ou_paths", c.ou_paths);
  getd("ou_h", c.ou_h);
  getd("ou_eps", c.ou_eps);
  geti("coupling_reps", c.coupling_reps);
  getvl("coupling_grid", c.coupling_grid);
  geti("mrca_reps", c.mrca_reps);
  getvl("mrca_grid", c.mrca_grid);
  return c;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : registry()) v.push_back(name);
    return v;
  }();
  return names;
}

TestReport run_one(const std::string& name, const VerifyConfig& cfg,
                   std::uint64_t seed) {
  const auto& reg = registry();
  for (size_t i = 0; i < reg.size(); ++i) {
    if (reg[i].first == name) return reg[i].second(cfg, seed, mix(seed, i));
  }
  throw std::invalid_argument("unknown verify test: " + name);
}

std::vector<TestReport> run_suite(const std::vector<std::string>& names,
                                  const VerifyConfig& cfg, std::uint64_t seed) {
  std::vector<TestReport> out;
  out.reserve(names.size());
  for (const auto& name : names) out.push_back(run_one(name, cfg, seed));
  return out;
}

}  // namespace bsz
