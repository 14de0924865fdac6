#pragma once

#include <optional>
#include <vector>

#include "egw/prob.hpp"

namespace egw {

// Bipartite support graph: left vertices are x symbols, right vertices are y
// symbols, and (x,y) is an edge iff p(x,y) > k_support_eps.
struct BipartiteSupportGraph {
  int nx = 0;
  int ny = 0;
  std::vector<std::vector<int>> adj_x;  // y-neighbours of each x
  std::vector<std::vector<int>> adj_y;  // x-neighbours of each y
  bool edge(int x, int y) const;
};

BipartiteSupportGraph build_bipartite(const JointPmf& p);

// Connected components of the support graph. Zero-mass symbols get label -1.
struct ComponentLabeling {
  int count = 0;
  std::vector<int> x_comp;
  std::vector<int> y_comp;
  std::vector<double> mass;  // probability of each component
};

ComponentLabeling support_components(const JointPmf& p);

// Gacs-Korner common information: the entropy of the component variable Q,
// which is the finest common function of X and Y. The witness channel is the
// deterministic map (x,y) -> component.
struct GacsKornerResult {
  double value_bits = 0;
  ComponentLabeling components;
  Channel witness;
};

GacsKornerResult gacs_korner(const JointPmf& p);

// A length-3 path x1 - y1 - x2 plus a second y-neighbour y2 of x1, i.e.
// cells (x1,y1), (x1,y2), (x2,y1) all in support with x1 != x2, y1 != y2.
struct PathWitness {
  int x1, y1, x2, y2;
};

std::optional<PathWitness> has_path_length_3(const JointPmf& p);

// Alternating cycle y_1, x_1, y_2, x_2, ..., x_a, (y_1): support cells
// (x_i, y_i) and (x_i, y_{i+1}) for i = 1..a with y_{a+1} = y_1, a >= 2.
struct CycleWitness {
  std::vector<int> xs;  // x_1..x_a
  std::vector<int> ys;  // y_1..y_a
};

std::optional<CycleWitness> find_cycle(const JointPmf& p);

// Confusability graph over X: x1 ~ x2 iff they share a y in support.
struct ConfusabilityGraph {
  int n = 0;
  std::vector<std::vector<bool>> adj;
};

ConfusabilityGraph confusability_graph(const JointPmf& p);

// All maximal independent sets (Bron-Kerbosch on the complement graph),
// each set sorted, the list sorted lexicographically. GraphTooLarge beyond
// vertex_cap vertices.
std::vector<std::vector<int>> independent_sets(const ConfusabilityGraph& g,
                                               int vertex_cap = 20);

// The condition under which the interaction quantities reach their maximum
// jointly: H(X) = H(Y) and p(x) = p(y) for every support pair (x,y), checked
// within tol. When it holds, every support component is square with uniform
// conditionals.
struct MaxConditionResult {
  bool holds = false;
  double entropy_gap = 0;  // |H(X) - H(Y)|
  double worst_pair_gap = 0;
};

MaxConditionResult max_condition_check(const JointPmf& p, double tol = 1e-9);

}  // namespace egw
