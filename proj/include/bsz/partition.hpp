#pragma once

#include <vector>

namespace bsz {

// Partition of the labels {1, ..., n} into disjoint blocks.  Blocks are kept
// sorted internally and ordered by their least element, so two partitions of
// the same set compare equal iff they are the same partition.
struct Partition {
  long n{0};
  std::vector<std::vector<int>> blocks;

  static Partition singletons(long n);

  long block_count() const { return (long)blocks.size(); }

  // merge the blocks at the given indices into one
  void merge(std::vector<int> idx);

  // index of the block containing a label, -1 if absent
  int block_of(int label) const;

  // restriction to a sub-label-set, relabeled as given (labels must be
  // present); used for sampling-consistency checks
  Partition restrict_to(const std::vector<int>& labels) const;

  void normalize();
  bool valid() const;

  bool operator==(const Partition& o) const {
    return n == o.n && blocks == o.blocks;
  }
};

}  // namespace bsz
