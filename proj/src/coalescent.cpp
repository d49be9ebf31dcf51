#include "bsz/coalescent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bsz/rates.hpp"

namespace bsz {

CoalescentRun simulate_coalescent(long n, const CoalescentOptions& opt, rng& g) {
  if (n < 1 || n > 1000000)
    throw std::invalid_argument("simulate_coalescent: n out of range");
  if (opt.labeled && n > 100000)
    throw std::invalid_argument("simulate_coalescent: labeled mode capped at 1e5");

  CoalescentRun run;
  run.path.n = n;
  run.path.events.push_back({0.0, n, std::nullopt});

  Partition part;
  std::vector<int> pick;  // scratch for k-subset selection
  if (opt.labeled) {
    part = Partition::singletons(n);
    if (opt.keep_partitions) run.partition_history.push_back(part);
  }

  double t = 0.0;
  long b = n;
  while (b > 1) {
    double prev = t;
    t += g.exp_rate(double(b - 1));
    // ties are measure-zero; refuse to emit one rather than tie-break
    if (!(t > prev))
      throw std::runtime_error("simulate_coalescent: event time tie");
    if (opt.horizon >= 0.0 && t > opt.horizon) break;
    long k = sample_merger_size(b, g);
    b -= k - 1;
    run.path.events.push_back({t, b, k});
    if (opt.labeled) {
      pick.clear();
      // uniform k-subset of block indices via partial Fisher-Yates on 0..b'+k-2
      long m = (long)part.blocks.size();
      std::vector<int> idx((size_t)m);
      for (long i = 0; i < m; ++i) idx[size_t(i)] = int(i);
      for (long i = 0; i < k; ++i) {
        long j = i + (long)g.below(uint64_t(m - i));
        std::swap(idx[size_t(i)], idx[size_t(j)]);
        pick.push_back(idx[size_t(i)]);
      }
      part.merge(pick);
      if (opt.keep_partitions) run.partition_history.push_back(part);
    }
  }
  if (opt.labeled) run.final_partition = std::move(part);
  return run;
}

double time_to_mrca(long n, rng& g) {
  if (n < 1) throw std::invalid_argument("time_to_mrca: n < 1");
  double t = 0.0;
  long b = n;
  while (b > 1) {
    t += g.exp_rate(double(b - 1));
    b -= sample_merger_size(b, g) - 1;
  }
  return t;
}

double total_branch_length(long n, rng& g) {
  if (n < 1) throw std::invalid_argument("total_branch_length: n < 1");
  double l = 0.0;
  long b = n;
  while (b > 1) {
    l += double(b) * g.exp_rate(double(b - 1));
    b -= sample_merger_size(b, g) - 1;
  }
  return l;
}

PaintboxSample paintbox_partition(long n, double t, rng& g,
                                  const PaintboxOptions& opt) {
  if (n < 1 || !(t > 0.0))
    throw std::invalid_argument("paintbox_partition: need n >= 1 and t > 0");
  double alpha = std::exp(-t);

  // points in decreasing order: J_i = (alpha Gamma_i)^(-1/alpha); given the
  // current smallest point J, the unrealized remainder below J has mean
  // J^(1-alpha)/(1-alpha), which is folded into the normalizer
  std::vector<double> pts;
  double gamma_walk = 0.0;
  double mass = 0.0;
  double dust = 0.0;
  const long max_pts = 2000000;
  for (;;) {
    gamma_walk += g.exp1();
    double j = std::pow(alpha * gamma_walk, -1.0 / alpha);
    if (opt.delta > 0.0 && j < opt.delta) {
      dust = std::pow(opt.delta, 1.0 - alpha) / (1.0 - alpha);
      break;
    }
    pts.push_back(j);
    mass += j;
    if (opt.delta <= 0.0) {
      // points not yet realized lie below j and carry conditional mean
      // j^(1-alpha)/(1-alpha); stop once that is a small enough share
      double rem = std::pow(j, 1.0 - alpha) / (1.0 - alpha);
      if (rem <= opt.rel_dust_tol * (mass + rem)) {
        dust = rem;
        break;
      }
    }
    if ((long)pts.size() >= max_pts)
      throw std::runtime_error("paintbox_partition: truncation did not converge");
  }

  double total = mass + dust;
  PaintboxSample out;
  out.realized_mass = mass;
  out.dust_mean = dust;
  out.dust_warning = dust > 0.01 * total;

  // throw n uniforms; labels sharing a subinterval share a block, throws in
  // the unrealized remainder become singletons
  std::vector<double> cum(pts.size());
  double acc = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    acc += pts[i];
    cum[i] = acc / total;
  }
  std::vector<std::vector<int>> groups(pts.size());
  Partition p;
  p.n = n;
  for (long lbl = 1; lbl <= n; ++lbl) {
    double u = g.u01();
    auto it = std::lower_bound(cum.begin(), cum.end(), u);
    if (it == cum.end())
      p.blocks.push_back({int(lbl)});
    else
      groups[size_t(it - cum.begin())].push_back(int(lbl));
  }
  for (auto& grp : groups)
    if (!grp.empty()) p.blocks.push_back(std::move(grp));
  p.normalize();
  out.partition = std::move(p);
  return out;
}

double expected_blocks(long n, double t) {
  if (n < 1 || t < 0.0)
    throw std::invalid_argument("expected_blocks: need n >= 1 and t >= 0");
  if (t == 0.0) return double(n);
  double a = std::exp(-t);
  return std::exp(std::lgamma(double(n) + a) - std::lgamma(double(n)) -
                  std::lgamma(a)) /
         a;
}

}  // namespace bsz
