#include "bsz/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace bsz {

bool RecursiveTree::valid() const {
  if (n < 1 || (long)parent.size() != n + 1) return false;
  if (!alive[1] || parent[1] != 0) return false;
  long cnt = 0;
  std::vector<char> seen(size_t(n) + 1, 0);
  for (int v = 1; v <= n; ++v) {
    if (!alive[size_t(v)]) continue;
    ++cnt;
    if (v != 1) {
      int p = parent[size_t(v)];
      if (p < 1 || p > n || !alive[size_t(p)]) return false;
    }
    for (int lbl : label[size_t(v)]) {
      if (lbl < 1 || lbl > n || seen[size_t(lbl)]) return false;
      seen[size_t(lbl)] = 1;
    }
  }
  if (cnt != alive_count) return false;
  // label sets, when present, must partition {1..n}
  long labeled = std::accumulate(seen.begin(), seen.end(), 0L);
  return labeled == 0 || labeled == n;
}

std::string RecursiveTree::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  auto& adj = j["edges"] = nlohmann::json::array();
  for (int v = 2; v <= n; ++v)
    if (alive[size_t(v)]) adj.push_back({parent[size_t(v)], v});
  return j.dump();
}

RecursiveTree build_rrt(long n, rng& g) {
  if (n < 1) throw std::invalid_argument("build_rrt: n < 1");
  RecursiveTree t;
  t.n = n;
  t.parent.assign(size_t(n) + 1, 0);
  t.children.assign(size_t(n) + 1, {});
  t.label.assign(size_t(n) + 1, {});
  t.birth.assign(size_t(n) + 1, 0.0);
  t.edge_clock.assign(size_t(n) + 1, 0.0);
  t.alive.assign(size_t(n) + 1, 1);
  t.alive[0] = 0;
  t.alive_count = n;
  for (int v = 1; v <= n; ++v) t.label[size_t(v)] = {v};
  for (int v = 2; v <= n; ++v) {
    int p = 1 + int(g.below(uint64_t(v - 1)));
    t.parent[size_t(v)] = p;
    t.children[size_t(p)].push_back(v);
  }
  return t;
}

namespace {

// collect the alive subtree rooted at y, iteratively
void collect_subtree(const RecursiveTree& t, int y, std::vector<int>& out) {
  out.clear();
  out.push_back(y);
  for (size_t i = 0; i < out.size(); ++i)
    for (int c : t.children[size_t(out[i])])
      if (t.alive[size_t(c)]) out.push_back(c);
}

void cut_in_place(RecursiveTree& t, int x, int y, std::vector<int>& removed,
                  bool move_labels) {
  collect_subtree(t, y, removed);
  for (int v : removed) {
    t.alive[size_t(v)] = 0;
    if (move_labels) {
      auto& src = t.label[size_t(v)];
      auto& dst = t.label[size_t(x)];
      dst.insert(dst.end(), src.begin(), src.end());
      src.clear();
    }
  }
  t.alive_count -= (long)removed.size();
  if (move_labels) {
    auto& dst = t.label[size_t(x)];
    std::sort(dst.begin(), dst.end());
  }
  auto& sib = t.children[size_t(x)];
  sib.erase(std::find(sib.begin(), sib.end(), y));
}

}  // namespace

RecursiveTree cut_edge(RecursiveTree tree, int x, int y) {
  if (y < 2 || y > tree.n || !tree.alive[size_t(y)] || tree.parent[size_t(y)] != x)
    throw std::invalid_argument("cut_edge: no such edge");
  std::vector<int> removed;
  cut_in_place(tree, x, y, removed, true);
  return tree;
}

long depth_sum(const RecursiveTree& tree) {
  long total = 0;
  std::vector<std::pair<int, long>> stack{{1, 0}};
  while (!stack.empty()) {
    auto [v, d] = stack.back();
    stack.pop_back();
    total += d;
    for (int c : tree.children[size_t(v)])
      if (tree.alive[size_t(c)]) stack.push_back({c, d + 1});
  }
  return total;
}

BlockPath coalescent_from_rrt(long n, rng& g) {
  if (n < 2) throw std::invalid_argument("coalescent_from_rrt: n < 2");
  RecursiveTree t = build_rrt(n, g);
  for (int v = 2; v <= n; ++v) t.edge_clock[size_t(v)] = g.exp1();

  std::vector<int> order((size_t)n - 1);
  std::iota(order.begin(), order.end(), 2);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return t.edge_clock[size_t(a)] < t.edge_clock[size_t(b)];
  });

  BlockPath path;
  path.n = n;
  path.events.push_back({0.0, n, std::nullopt});
  long b = n;
  std::vector<int> removed;
  for (int y : order) {
    if (!t.alive[size_t(y)]) continue;  // died inside an earlier cut
    cut_in_place(t, t.parent[size_t(y)], y, removed, false);
    long k = (long)removed.size() + 1;
    b -= k - 1;
    if (!(t.edge_clock[size_t(y)] > path.events.back().time))
      throw std::runtime_error("coalescent_from_rrt: event time tie");
    path.events.push_back({t.edge_clock[size_t(y)], b, k});
    if (b == 1) break;
  }
  return path;
}

EvolvingTreeState init_evolving_tree(long n, rng& g) {
  if (n < 2) throw std::invalid_argument("init_evolving_tree: n < 2");
  EvolvingTreeState st;
  st.tree = build_rrt(n, g);
  for (auto& l : st.tree.label) l.clear();
  for (int v = 2; v <= n; ++v) st.tree.edge_clock[size_t(v)] = g.exp1();
  st.now = 0.0;
  double mx = 0.0;
  for (int c : st.tree.children[1]) mx = std::max(mx, st.tree.edge_clock[size_t(c)]);
  st.root_max = mx;
  return st;
}

EvolveResult evolve_tree(EvolvingTreeState& state, double horizon, rng& g) {
  if (horizon < 0.0) throw std::invalid_argument("evolve_tree: negative horizon");
  RecursiveTree& t = state.tree;
  const long n = t.n;
  const double shift = std::log(std::log(double(n)));
  const double t_end = state.now + horizon;

  // edge_clock holds absolute expiry times while we run; converted back to
  // remaining labels on exit
  for (int v = 2; v <= n; ++v) t.edge_clock[size_t(v)] += state.now;

  using entry = std::pair<double, std::pair<int, long>>;  // expiry, vertex, gen
  std::priority_queue<entry, std::vector<entry>, std::greater<entry>> pq;
  std::vector<long> gen(size_t(n) + 1, 0);
  for (int v = 2; v <= n; ++v) pq.push({t.edge_clock[size_t(v)], {v, 0}});

  std::multiset<double> root_exp;
  for (int c : t.children[1]) root_exp.insert(t.edge_clock[size_t(c)]);

  std::vector<int> alive_list((size_t)n);
  std::vector<int> pos(size_t(n) + 1);
  for (int v = 1; v <= n; ++v) {
    alive_list[size_t(v - 1)] = v;
    pos[size_t(v)] = v - 1;
  }

  EvolveResult out;
  out.rn_path.add(state.now, state.root_max - shift, false);

  std::vector<int> removed;
  while (!pq.empty() && pq.top().first <= t_end) {
    auto [expiry, vg] = pq.top();
    pq.pop();
    int y = vg.first;
    if (vg.second != gen[size_t(y)] || !t.alive[size_t(y)]) continue;

    int x = t.parent[size_t(y)];
    if (x == 1) root_exp.erase(root_exp.find(expiry));
    double pre = root_exp.empty() ? 0.0 : *root_exp.rbegin() - expiry;

    cut_in_place(t, x, y, removed, false);
    for (int v : removed) {
      ++gen[size_t(v)];
      int last = alive_list.back();
      alive_list[size_t(pos[size_t(v)])] = last;
      pos[size_t(last)] = pos[size_t(v)];
      alive_list.pop_back();
    }

    std::sort(removed.begin(), removed.end());
    for (int v : removed) {
      int p = alive_list[size_t(g.below(alive_list.size()))];
      t.parent[size_t(v)] = p;
      t.children[size_t(p)].push_back(v);
      t.children[size_t(v)].clear();
      t.birth[size_t(v)] = expiry;
      t.alive[size_t(v)] = 1;
      double e = expiry + g.exp1();
      t.edge_clock[size_t(v)] = e;
      pq.push({e, {v, gen[size_t(v)]}});
      pos[size_t(v)] = (int)alive_list.size();
      alive_list.push_back(v);
      if (p == 1) root_exp.insert(e);
    }
    t.alive_count = n;

    double post = *root_exp.rbegin() - expiry;
    if (post != pre) {
      out.rn_path.add(expiry, pre - shift, false);
      out.rn_path.add(expiry, post - shift, true);
    }
    ++out.cuts;
  }

  state.now = t_end;
  state.root_max = *root_exp.rbegin() - t_end;
  out.rn_path.add(t_end, state.root_max - shift, false);
  for (int v = 2; v <= n; ++v) t.edge_clock[size_t(v)] -= t_end;
  return out;
}

}  // namespace bsz
