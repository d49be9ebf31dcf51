#include "bsz/partition.hpp"

#include <algorithm>
#include <stdexcept>

namespace bsz {

Partition Partition::singletons(long n) {
  Partition p;
  p.n = n;
  p.blocks.resize(size_t(n));
  for (long i = 0; i < n; ++i) p.blocks[size_t(i)] = {int(i + 1)};
  return p;
}

void Partition::merge(std::vector<int> idx) {
  if (idx.size() < 2) throw std::invalid_argument("Partition::merge: need >= 2 blocks");
  std::sort(idx.begin(), idx.end());
  if (idx.front() < 0 || idx.back() >= (int)blocks.size() ||
      std::adjacent_find(idx.begin(), idx.end()) != idx.end())
    throw std::invalid_argument("Partition::merge: bad block indices");
  auto& dst = blocks[size_t(idx[0])];
  for (size_t j = 1; j < idx.size(); ++j) {
    auto& src = blocks[size_t(idx[j])];
    dst.insert(dst.end(), src.begin(), src.end());
    src.clear();
  }
  blocks.erase(std::remove_if(blocks.begin(), blocks.end(),
                              [](const std::vector<int>& b) { return b.empty(); }),
               blocks.end());
  normalize();
}

int Partition::block_of(int label) const {
  for (size_t i = 0; i < blocks.size(); ++i)
    if (std::binary_search(blocks[i].begin(), blocks[i].end(), label)) return (int)i;
  return -1;
}

Partition Partition::restrict_to(const std::vector<int>& labels) const {
  Partition r;
  r.n = (long)labels.size();
  std::vector<std::vector<int>> out(blocks.size());
  for (size_t j = 0; j < labels.size(); ++j) {
    int b = block_of(labels[j]);
    if (b < 0) throw std::invalid_argument("Partition::restrict_to: label absent");
    out[size_t(b)].push_back(int(j + 1));
  }
  for (auto& blk : out)
    if (!blk.empty()) r.blocks.push_back(std::move(blk));
  r.normalize();
  return r;
}

void Partition::normalize() {
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  std::sort(blocks.begin(), blocks.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              return a.front() < b.front();
            });
}

bool Partition::valid() const {
  std::vector<char> seen(size_t(n) + 1, 0);
  long total = 0;
  for (const auto& b : blocks) {
    if (b.empty()) return false;
    for (int x : b) {
      if (x < 1 || x > n || seen[size_t(x)]) return false;
      seen[size_t(x)] = 1;
      ++total;
    }
  }
  return total == n;
}

}  // namespace bsz
