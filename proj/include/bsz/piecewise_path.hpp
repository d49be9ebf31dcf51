#pragma once

#include <string>
#include <vector>

namespace bsz {

// Sampled real-valued path.  Consecutive samples are joined linearly; a jump
// is stored as two samples at the same time, the second flagged is_jump (its
// value is the post-jump, right-continuous one).
struct PiecewisePath {
  struct Sample {
    double time{};
    double value{};
    bool is_jump{false};
  };
  std::vector<Sample> samples;

  void add(double t, double v, bool jump = false) { samples.push_back({t, v, jump}); }

  // right-continuous evaluation by linear interpolation
  double at(double t) const;

  std::vector<double> jump_times() const;

  // columns: time,value,is_jump
  std::string to_csv() const;
};

}  // namespace bsz
