#include "bsz/population.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bsz/csv.hpp"
#include "bsz/rates.hpp"

namespace bsz {

double offspring_pmf(long n, long k) {
  if (n < 2 || k < 1 || k > n - 1)
    throw std::invalid_argument("offspring_pmf: need n >= 2 and 1 <= k <= n-1");
  return (double(n) / double(n - 1)) / (double(k) * double(k + 1));
}

long sample_offspring(long n, rng& g) {
  if (n < 2) throw std::invalid_argument("sample_offspring: n < 2");
  // tail P(xi >= k) = (n/k - 1)/(n - 1) inverts in O(1)
  double u = g.u01();
  long k = (long)std::floor(double(n) / (u * double(n - 1) + 1.0));
  return std::clamp(k, long(1), n - 1);
}

bool EventLog::valid() const {
  if (n < 2 || !(t0 <= t1)) return false;
  std::vector<char> seen((size_t)n + 1, 0);
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& e : events) {
    if (!(e.time > prev) || e.time < t0 || e.time > t1) return false;
    prev = e.time;
    if (e.parent < 1 || e.parent > n) return false;
    if (e.victims.empty() || (long)e.victims.size() > n - 1) return false;
    for (int v : e.victims) {
      if (v < 1 || v > n || v == e.parent || seen[(size_t)v]) return false;
      seen[(size_t)v] = 1;
    }
    for (int v : e.victims) seen[(size_t)v] = 0;
  }
  return true;
}

std::string EventLog::to_csv() const {
  std::string out = "time,parent,offspring_count,victims\n";
  for (const auto& e : events) {
    out += fmt_double(e.time);
    out += ',';
    out += fmt_int(e.parent);
    out += ',';
    out += fmt_int((long)e.victims.size());
    out += ',';
    for (size_t i = 0; i < e.victims.size(); ++i) {
      if (i) out += ';';
      out += fmt_int(e.victims[i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

// persistent permutation with positions, for O(xi) uniform subset draws
struct label_pool {
  std::vector<int> perm;
  std::vector<int> pos;  // pos[label] = index in perm

  explicit label_pool(long n) : perm((size_t)n), pos((size_t)n + 1) {
    for (long i = 0; i < n; ++i) {
      perm[(size_t)i] = (int)(i + 1);
      pos[(size_t)(i + 1)] = (int)i;
    }
  }

  void swap_slots(int i, int j) {
    if (i == j) return;
    std::swap(perm[(size_t)i], perm[(size_t)j]);
    pos[(size_t)perm[(size_t)i]] = i;
    pos[(size_t)perm[(size_t)j]] = j;
  }

  // uniform k-subset of labels excluding `parent`, written sorted into out
  void draw_excluding(long n, int parent, long k, rng& g, std::vector<int>& out) {
    swap_slots(pos[(size_t)parent], (int)n - 1);
    out.clear();
    for (long i = 0; i < k; ++i) {
      int j = (int)(i + (long)g.below((unsigned long)(n - 1 - i)));
      swap_slots((int)i, j);
      out.push_back(perm[(size_t)i]);
    }
    std::sort(out.begin(), out.end());
  }

  // uniform k-subset of all labels, unsorted, left in perm[0..k)
  void draw(long n, long k, rng& g) {
    for (long i = 0; i < k; ++i) {
      int j = (int)(i + (long)g.below((unsigned long)(n - i)));
      swap_slots((int)i, j);
    }
  }
};

void append_events(EventLog& log, double a, double b, label_pool& pool, rng& g,
                   std::vector<PopEvent>& out) {
  long n = log.n;
  double t = a;
  for (;;) {
    t += g.exp_rate(double(n - 1));
    if (t >= b) break;
    PopEvent e;
    e.time = t;
    e.parent = (int)(1 + g.below((unsigned long)n));
    long xi = sample_offspring(n, g);
    pool.draw_excluding(n, e.parent, xi, g, e.victims);
    out.push_back(std::move(e));
  }
}

}  // namespace

EventLog simulate_population(long n, double t0, double t1, rng& g) {
  if (n < 2) throw std::invalid_argument("simulate_population: n < 2");
  if (!(t0 <= t1) || !std::isfinite(t0) || !std::isfinite(t1))
    throw std::invalid_argument("simulate_population: bad window");
  EventLog log;
  log.n = n;
  log.t0 = t0;
  log.t1 = t1;
  label_pool pool(n);
  append_events(log, t0, t1, pool, g, log.events);
  return log;
}

void extend_population(EventLog& log, double new_t0, rng& g) {
  if (!(new_t0 < log.t0))
    throw std::invalid_argument("extend_population: window does not grow");
  label_pool pool(log.n);
  std::vector<PopEvent> older;
  append_events(log, new_t0, log.t0, pool, g, older);
  log.events.insert(log.events.begin(), older.begin(), older.end());
  log.t0 = new_t0;
}

namespace {

// backward occupancy scan shared by genealogy_at and ancestor_trace; count
// holds the number of surviving ancestral lines at the end of the scan
BlockPath trace_lines(const EventLog& log, double s, double max_age, long& count) {
  long n = log.n;
  std::vector<char> occ((size_t)n + 1, 1);
  count = n;

  BlockPath tr;
  tr.n = n;
  tr.events.push_back({0.0, n, std::nullopt});

  double last_age = 0.0;
  // first event strictly before s
  auto it = std::lower_bound(log.events.begin(), log.events.end(), s,
                             [](const PopEvent& e, double v) { return e.time < v; });
  size_t idx = (size_t)(it - log.events.begin());
  while (idx > 0 && count > 1) {
    const PopEvent& e = log.events[--idx];
    double age = s - e.time;
    if (age > max_age) break;
    long hits = 0;
    for (int v : e.victims) hits += occ[(size_t)v];
    if (hits == 0) continue;
    bool parent_occ = occ[(size_t)e.parent] != 0;
    for (int v : e.victims) occ[(size_t)v] = 0;
    occ[(size_t)e.parent] = 1;
    long msize = hits + (parent_occ ? 1 : 0);
    if (msize < 2) continue;  // a single line relocates, no coalescence
    if (!(age > last_age))
      throw std::runtime_error("trace_lines: event age tie");
    last_age = age;
    count -= msize - 1;
    tr.events.push_back({age, count, msize});
  }
  return tr;
}

}  // namespace

GenealogyFrame genealogy_at(const EventLog& log, double s) {
  if (!(s > log.t0) || !(s <= log.t1))
    throw std::invalid_argument("genealogy_at: s outside the log window");
  GenealogyFrame fr;
  fr.s = s;
  long count = 0;
  fr.trace = trace_lines(log, s, std::numeric_limits<double>::infinity(), count);
  if (count > 1) throw lookback_exhausted("genealogy_at: lookback exhausted");
  fr.a = *fr.trace.absorption_time();
  fr.l = fr.trace.total_length();
  return fr;
}

BlockPath ancestor_trace(const EventLog& log, double s, double max_age) {
  if (!(s > log.t0) || !(s <= log.t1))
    throw std::invalid_argument("ancestor_trace: s outside the log window");
  if (!(max_age >= 0.0))
    throw std::invalid_argument("ancestor_trace: negative max_age");
  long count = 0;
  return trace_lines(log, s, max_age, count);
}

GenealogyFrame sample_genealogy(long n, double s, rng& g) {
  double ll = std::log(std::log(std::max(double(n), 16.0)));
  double lookback = std::max(3.0 * ll, 1.0);
  EventLog log = simulate_population(n, s - lookback, s, g);
  for (;;) {
    try {
      return genealogy_at(log, s);
    } catch (const lookback_exhausted&) {
      lookback *= 2.0;
      extend_population(log, s - lookback, g);
    }
  }
}

std::string genealogy_summary_csv(const std::vector<GenealogyFrame>& frames) {
  std::string out = "s,a,l,n\n";
  for (const auto& fr : frames) {
    out += fmt_double(fr.s);
    out += ',';
    out += fmt_double(fr.a);
    out += ',';
    out += fmt_double(fr.l);
    out += ',';
    out += fmt_int(fr.trace.n);
    out += '\n';
  }
  return out;
}

bool PointField::valid() const {
  if (!(t0 <= t1) || !(y_min > 0.0) || !(y_min <= y_max)) return false;
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    if (!(p.t >= prev) || p.t < t0 || p.t > t1) return false;
    prev = p.t;
    if (!(p.y >= y_min) || !(p.y <= y_max)) return false;
  }
  return true;
}

PointField simulate_psi(double t0, double t1, double y_min, double y_max, rng& g) {
  if (!(t0 <= t1) || !std::isfinite(t0) || !std::isfinite(t1))
    throw std::invalid_argument("simulate_psi: bad time window");
  if (!(y_min > 0.0) || !(y_min < y_max))
    throw std::invalid_argument("simulate_psi: bad mark window");
  double inv_lo = 1.0 / y_min;
  double inv_hi = std::isinf(y_max) ? 0.0 : 1.0 / y_max;
  double rate = inv_lo - inv_hi;
  PointField f;
  f.t0 = t0;
  f.t1 = t1;
  f.y_min = y_min;
  f.y_max = y_max;
  double t = t0;
  for (;;) {
    t += g.exp_rate(rate);
    if (t >= t1) break;
    double y = 1.0 / (inv_lo - g.u01() * rate);
    f.points.push_back({t, y});
  }
  return f;
}

PointField build_theta_from_psi(const PointField& psi, long n) {
  if (n < 2) throw std::invalid_argument("build_theta_from_psi: n < 2");
  if (!psi.valid()) throw std::invalid_argument("build_theta_from_psi: bad field");
  double ln = std::log(double(n));
  PointField th;
  th.t0 = -psi.t1 / ln;
  th.t1 = -psi.t0 / ln;
  th.y_min = std::min(psi.y_min / ln, 1.0);
  th.y_max = std::min(psi.y_max / ln, 1.0);
  for (auto it = psi.points.rbegin(); it != psi.points.rend(); ++it) {
    double y = it->y / ln;
    if (y > 1.0) continue;
    th.points.push_back({-it->t / ln, y});
  }
  return th;
}

std::optional<PopEvent> realize_field_point(long n, double t, double y, rng& g) {
  if (n < 2 || !(y > 0.0) || y > 1.0)
    throw std::invalid_argument("realize_field_point: need n >= 2, y in (0,1]");
  std::vector<int> hit;
  int parent = 0;
  double best = 2.0;
  for (long i = 1; i <= n; ++i) {
    double u = g.u01();
    if (u < y) {
      hit.push_back((int)i);
      if (u < best) {
        best = u;
        parent = (int)i;
      }
    }
  }
  if (hit.size() < 2) return std::nullopt;
  PopEvent e;
  e.time = t;
  e.parent = parent;
  e.mark = y;
  e.from_field = true;
  e.victims.reserve(hit.size() - 1);
  for (int v : hit)
    if (v != parent) e.victims.push_back(v);
  return e;
}

double coupling_eps(long n) {
  if (n < 2) throw std::invalid_argument("coupling_eps: n < 2");
  return std::exp(-std::sqrt(std::log(double(n))));
}

double default_cutoff(long n) { return coupling_eps(n) / std::log(double(n)); }

namespace {

// mark of a small merger event, density proportional to
// P(Binomial(n,y) >= 2) / y^2 on (0, cutoff]; rejection below the envelope
// min(C(n,2), y^-2)
double sample_truncated_mark(long n, double cutoff, rng& g) {
  double c2 = 0.5 * double(n) * double(n - 1);
  double y0 = std::min(1.0 / std::sqrt(c2), cutoff);
  double m1 = c2 * y0;                        // flat piece (0, y0]
  double m2 = 1.0 / y0 - 1.0 / cutoff;        // y^-2 piece (y0, cutoff]
  for (;;) {
    double y;
    double env;
    if (g.u01() * (m1 + m2) < m1) {
      y = y0 * g.u01();
      env = c2;
    } else {
      y = 1.0 / (1.0 / y0 - g.u01() * m2);
      env = 1.0 / (y * y);
    }
    if (y <= 0.0 || y > cutoff) continue;
    if (g.u01() * env < total_rate_density(n, y)) return y;
  }
}

// number of participants given the mark, pmf proportional to
// C(n,k) y^k (1-y)^{n-k} on k >= 2, walked upward from k = 2
long sample_hits_given_mark(long n, double y, rng& g) {
  if (!(y < 1.0)) return n;
  double total = y * y * total_rate_density(n, y);
  double term = 0.5 * double(n) * double(n - 1) * y * y *
                std::exp(double(n - 2) * std::log1p(-y));
  double r = y / (1.0 - y);
  double u = g.u01() * total;
  long k = 2;
  while (u > term && k < n) {
    u -= term;
    term *= double(n - k) / double(k + 1) * r;
    ++k;
  }
  return k;
}

}  // namespace

EventLog simulate_population_coupled(long n, const PointField& psi, double cutoff,
                                     rng& g) {
  if (n < 2) throw std::invalid_argument("simulate_population_coupled: n < 2");
  if (!(cutoff > 0.0) || cutoff > 1.0)
    throw std::invalid_argument("simulate_population_coupled: cutoff outside (0,1]");
  PointField th = build_theta_from_psi(psi, n);

  EventLog log;
  log.n = n;
  log.t0 = th.t0;
  log.t1 = th.t1;

  double lam = truncated_total_rate(n, cutoff);
  label_pool pool(n);
  std::vector<int> chosen;

  size_t ip = 0;  // next explicit point
  double t_imp = th.t0 + g.exp_rate(lam);
  double prev = -std::numeric_limits<double>::infinity();
  for (;;) {
    while (ip < th.points.size() && th.points[ip].y <= cutoff) ++ip;
    double t_exp = ip < th.points.size() ? th.points[ip].t
                                         : std::numeric_limits<double>::infinity();
    if (t_imp >= th.t1 && t_exp > th.t1) break;
    if (t_exp <= t_imp) {
      auto e = realize_field_point(n, t_exp, th.points[ip].y, g);
      ++ip;
      if (e) {
        if (!(e->time > prev))
          throw std::runtime_error("simulate_population_coupled: event time tie");
        prev = e->time;
        log.events.push_back(std::move(*e));
      }
    } else {
      double y = sample_truncated_mark(n, cutoff, g);
      long k = sample_hits_given_mark(n, y, g);
      pool.draw(n, k, g);
      chosen.assign(pool.perm.begin(), pool.perm.begin() + k);
      int parent = chosen[(size_t)g.below((unsigned long)k)];
      PopEvent e;
      e.time = t_imp;
      e.parent = parent;
      e.mark = y;
      e.victims.reserve((size_t)k - 1);
      for (int v : chosen)
        if (v != parent) e.victims.push_back(v);
      std::sort(e.victims.begin(), e.victims.end());
      if (!(e.time > prev))
        throw std::runtime_error("simulate_population_coupled: event time tie");
      prev = e.time;
      log.events.push_back(std::move(e));
      t_imp += g.exp_rate(lam);
    }
  }
  return log;
}

}  // namespace bsz
