#include "bsz/block_path.hpp"

#include <stdexcept>

#include "bsz/csv.hpp"

namespace bsz {

long BlockPath::count_at(double t) const {
  if (events.empty() || t < events.front().time)
    throw std::invalid_argument("BlockPath::count_at: time before path start");
  long c = events.front().block_count;
  for (const auto& e : events) {
    if (e.time > t) break;
    c = e.block_count;
  }
  return c;
}

std::optional<double> BlockPath::absorption_time() const {
  if (events.empty() || events.back().block_count != 1) return std::nullopt;
  return events.back().time;
}

double BlockPath::total_length() const {
  if (!absorption_time())
    throw std::invalid_argument("BlockPath::total_length: path not absorbed");
  double l = 0.0;
  for (size_t i = 0; i + 1 < events.size(); ++i) {
    long c = events[i].block_count;
    if (c > 1) l += double(c) * (events[i + 1].time - events[i].time);
  }
  return l;
}

bool BlockPath::valid() const {
  if (events.empty()) return false;
  if (events.front().time != 0.0 || events.front().block_count != n) return false;
  if (events.front().merger_size) return false;
  for (size_t i = 1; i < events.size(); ++i) {
    const auto& e = events[i];
    if (!(e.time > events[i - 1].time)) return false;
    if (!e.merger_size || *e.merger_size < 2) return false;
    if (e.block_count != events[i - 1].block_count - (*e.merger_size - 1)) return false;
    if (e.block_count < 1) return false;
  }
  return true;
}

std::string BlockPath::to_csv() const {
  std::string out = "time,block_count,merger_size\n";
  for (const auto& e : events) {
    out += fmt_double(e.time);
    out += ',';
    out += fmt_int(e.block_count);
    out += ',';
    if (e.merger_size) out += fmt_int(*e.merger_size);
    out += '\n';
  }
  return out;
}

}  // namespace bsz
