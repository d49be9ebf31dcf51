#include "bsz/piecewise_path.hpp"

#include <algorithm>
#include <stdexcept>

#include "bsz/csv.hpp"

namespace bsz {

double PiecewisePath::at(double t) const {
  if (samples.empty() || t < samples.front().time || t > samples.back().time)
    throw std::invalid_argument("PiecewisePath::at: time outside path");
  // last sample with time <= t (right-continuity at jump pairs)
  size_t lo = 0, hi = samples.size();
  while (hi - lo > 1) {
    size_t mid = (lo + hi) / 2;
    if (samples[mid].time <= t)
      lo = mid;
    else
      hi = mid;
  }
  if (lo + 1 == samples.size() || samples[lo].time == t) return samples[lo].value;
  const auto& a = samples[lo];
  const auto& b = samples[lo + 1];
  double w = (t - a.time) / (b.time - a.time);
  return a.value + w * (b.value - a.value);
}

std::vector<double> PiecewisePath::jump_times() const {
  std::vector<double> out;
  for (const auto& s : samples)
    if (s.is_jump) out.push_back(s.time);
  return out;
}

std::string PiecewisePath::to_csv() const {
  std::string out = "time,value,is_jump\n";
  for (const auto& s : samples) {
    out += fmt_double(s.time);
    out += ',';
    out += fmt_double(s.value);
    out += s.is_jump ? ",1\n" : ",0\n";
  }
  return out;
}

}  // namespace bsz
