#pragma once

#include <optional>
#include <string>
#include <vector>

namespace bsz {

// Right-continuous step record of a coalescing block count.  The first
// event is (0, n, none); each later event is a merger: the count drops by
// merger_size - 1 at that time.
struct BlockPath {
  long n{0};

  struct Event {
    double time{};
    long block_count{};
    std::optional<long> merger_size;
  };
  std::vector<Event> events;

  long count_at(double t) const;

  // time of the last merger if the path reaches a single block
  std::optional<double> absorption_time() const;

  // integral of the block count over time while more than one block remains;
  // requires an absorbed path
  double total_length() const;

  bool valid() const;

  // columns: time,block_count,merger_size (merger_size empty on the first row)
  std::string to_csv() const;
};

}  // namespace bsz
