#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsz/block_path.hpp"
#include "bsz/rng.hpp"

namespace bsz {

// offspring law of the size-n population: pmf(k) = (n/(n-1)) / (k(k+1))
// on k = 1..n-1
double offspring_pmf(long n, long k);
long sample_offspring(long n, rng& g);

struct PopEvent {
  double time{};
  int parent{};
  std::vector<int> victims;  // labels replaced by the parent's offspring
  double mark{-1.0};         // field mark behind the event, negative when none
  bool from_field{false};    // realized from an explicit field point
};

struct EventLog {
  long n{0};
  double t0{};
  double t1{};
  std::vector<PopEvent> events;  // sorted by time, strictly increasing

  bool valid() const;
  // columns: time,parent,offspring_count,victims (victims semicolon-joined)
  std::string to_csv() const;
};

// changes at rate n-1: uniform parent, xi offspring replacing a uniform
// xi-subset of the other n-1 individuals
EventLog simulate_population(long n, double t0, double t1, rng& g);

// prepend events on [new_t0, log.t0); grows the lookback window in place
void extend_population(EventLog& log, double new_t0, rng& g);

struct lookback_exhausted : std::runtime_error {
  explicit lookback_exhausted(const std::string& what) : std::runtime_error(what) {}
};

struct GenealogyFrame {
  double s{};       // observation time
  BlockPath trace;  // ancestor count by age t, right-continuous
  double a{};       // age at which a single ancestor remains
  double l{};       // total branch length of the genealogy
};

// trace the ancestral lines of the population at time s backward through the
// log; throws lookback_exhausted if the log ends before the lines coalesce
GenealogyFrame genealogy_at(const EventLog& log, double s);

// ancestor count of the time-s sample by age, traced only through ages in
// [0, max_age]; unlike genealogy_at the lines need not coalesce
BlockPath ancestor_trace(const EventLog& log, double s, double max_age);

// simulates its own log ending at s, doubling the lookback until coalescence
GenealogyFrame sample_genealogy(long n, double s, rng& g);

// columns: s,a,l,n
std::string genealogy_summary_csv(const std::vector<GenealogyFrame>& frames);

struct PointField {
  double t0{};
  double t1{};
  double y_min{};
  double y_max{};  // may be +infinity

  struct Point {
    double t{};
    double y{};
  };
  std::vector<Point> points;  // sorted by t

  bool valid() const;
};

// Poisson field with density dt * y^-2 dy on [t0,t1] x (y_min, y_max)
PointField simulate_psi(double t0, double t1, double y_min, double y_max, rng& g);

// image under (t, y) -> (-t/log n, y/log n); marks above 1 are dropped
PointField build_theta_from_psi(const PointField& psi, long n);

// one field point acting on the population: every individual draws a uniform,
// those below y take part, the smallest uniform becomes the parent; no event
// unless at least two take part
std::optional<PopEvent> realize_field_point(long n, double t, double y, rng& g);

double coupling_eps(long n);    // e^{-sqrt(log n)}
double default_cutoff(long n);  // coupling_eps(n) / log n

// points of theta with mark above `cutoff` realized explicitly through
// realize_field_point; the activity of smaller marks generated as a chain of
// truncated-rate merger events; streams merged by time
EventLog simulate_population_coupled(long n, const PointField& psi, double cutoff,
                                     rng& g);

}  // namespace bsz
