#pragma once

#include <string>
#include <vector>

#include "bsz/block_path.hpp"
#include "bsz/piecewise_path.hpp"
#include "bsz/rng.hpp"

namespace bsz {

// Rooted tree on vertices 1..n, root 1.  Two usage modes share the type:
// cutting mode carries a label set per vertex (the sets partition {1..n}
// across alive vertices), evolving mode carries a birth time per vertex.
// edge_clock[v] is the remaining exponential label on the edge between v and
// parent[v].
struct RecursiveTree {
  long n{0};
  std::vector<int> parent;                 // parent[1] = 0
  std::vector<std::vector<int>> children;  // alive children only
  std::vector<std::vector<int>> label;     // cutting mode, sorted sets
  std::vector<double> birth;               // evolving mode
  std::vector<double> edge_clock;          // indexed by the child vertex
  std::vector<char> alive;
  long alive_count{0};

  bool valid() const;
  std::string to_json() const;  // adjacency dump for debugging
};

// Uniform random recursive tree: vertex 1 is the root, vertex k >= 2 attaches
// to a parent chosen uniformly from {1..k-1}.
RecursiveTree build_rrt(long n, rng& g);

// Remove the edge between x and y (x the endpoint closer to the root) along
// with the whole subtree rooted at y; every label in the removed vertices'
// sets moves to x.
RecursiveTree cut_edge(RecursiveTree tree, int x, int y);

// sum of root distances (in edges) over alive vertices
long depth_sum(const RecursiveTree& tree);

// Coalescent block path via edge cutting: put iid Exp(1) labels on the
// edges of a fresh tree and cut surviving edges in increasing label order;
// each cut merges the removed subtree's blocks into the proximal endpoint's
// block.  Equal in law to simulate_coalescent(n).
BlockPath coalescent_from_rrt(long n, rng& g);

// Stationary tree dynamic: every edge label shrinks at speed one; a label
// hitting zero cuts its edge, and the removed vertices rejoin one at a time
// (ascending vertex id), each picking a uniform parent among the vertices
// present at that moment, with fresh Exp(1) labels.
struct EvolvingTreeState {
  RecursiveTree tree;
  double now{0.0};
  double root_max{0.0};  // largest clock among root-adjacent edges
};

EvolvingTreeState init_evolving_tree(long n, rng& g);

struct EvolveResult {
  PiecewisePath rn_path;  // t -> root_max(t) - log log n, right-continuous
  long cuts{0};
};

EvolveResult evolve_tree(EvolvingTreeState& state, double horizon, rng& g);

}  // namespace bsz
