#include "egw/graph.hpp"

#include <algorithm>
#include <cmath>

namespace egw {

bool BipartiteSupportGraph::edge(int x, int y) const {
  return std::find(adj_x[x].begin(), adj_x[x].end(), y) != adj_x[x].end();
}

BipartiteSupportGraph build_bipartite(const JointPmf& p) {
  BipartiteSupportGraph g;
  g.nx = p.nx();
  g.ny = p.ny();
  g.adj_x.resize(g.nx);
  g.adj_y.resize(g.ny);
  for (int x = 0; x < g.nx; ++x)
    for (int y = 0; y < g.ny; ++y)
      if (p.at(x, y) > k_support_eps) {
        g.adj_x[x].push_back(y);
        g.adj_y[y].push_back(x);
      }
  return g;
}

ComponentLabeling support_components(const JointPmf& p) {
  const auto g = build_bipartite(p);
  ComponentLabeling lab;
  lab.x_comp.assign(g.nx, -1);
  lab.y_comp.assign(g.ny, -1);
  for (int sx = 0; sx < g.nx; ++sx) {
    if (lab.x_comp[sx] != -1 || g.adj_x[sx].empty()) continue;
    const int comp = lab.count++;
    // BFS alternating sides.
    std::vector<int> qx = {sx};
    lab.x_comp[sx] = comp;
    std::vector<int> qy;
    while (!qx.empty() || !qy.empty()) {
      if (!qx.empty()) {
        const int x = qx.back();
        qx.pop_back();
        for (int y : g.adj_x[x])
          if (lab.y_comp[y] == -1) {
            lab.y_comp[y] = comp;
            qy.push_back(y);
          }
      } else {
        const int y = qy.back();
        qy.pop_back();
        for (int x : g.adj_y[y])
          if (lab.x_comp[x] == -1) {
            lab.x_comp[x] = comp;
            qx.push_back(x);
          }
      }
    }
  }
  lab.mass.assign(lab.count, 0.0);
  for (int x = 0; x < g.nx; ++x)
    for (int y = 0; y < g.ny; ++y)
      if (p.at(x, y) > k_support_eps) lab.mass[lab.x_comp[x]] += p.at(x, y);
  return lab;
}

GacsKornerResult gacs_korner(const JointPmf& p) {
  GacsKornerResult r;
  r.components = support_components(p);
  r.value_bits = entropy_bits(r.components.mass);
  const int u_size = std::max(r.components.count, 1);
  std::vector<int> map(static_cast<size_t>(p.nx()) * p.ny(), 0);
  for (int x = 0; x < p.nx(); ++x)
    for (int y = 0; y < p.ny(); ++y) {
      int c = -1;
      if (p.at(x, y) > k_support_eps)
        c = r.components.x_comp[x];
      else if (r.components.x_comp[x] != -1)
        c = r.components.x_comp[x];  // off-support cell: follow the x side
      else if (r.components.y_comp[y] != -1)
        c = r.components.y_comp[y];
      map[static_cast<size_t>(x) * p.ny() + y] = std::max(c, 0);
    }
  r.witness = deterministic_channel(p.nx(), p.ny(), map, u_size);
  return r;
}

std::optional<PathWitness> has_path_length_3(const JointPmf& p) {
  const auto g = build_bipartite(p);
  for (int x1 = 0; x1 < g.nx; ++x1) {
    if (g.adj_x[x1].size() < 2) continue;
    for (int y1 : g.adj_x[x1]) {
      if (g.adj_y[y1].size() < 2) continue;
      for (int x2 : g.adj_y[y1]) {
        if (x2 == x1) continue;
        for (int y2 : g.adj_x[x1]) {
          if (y2 == y1) continue;
          return PathWitness{x1, y1, x2, y2};
        }
      }
    }
  }
  return std::nullopt;
}

namespace {

// DFS over the combined vertex set (x vertices 0..nx-1, y vertices
// nx..nx+ny-1). A back edge to an ancestor closes a simple cycle.
struct CycleDfs {
  const BipartiteSupportGraph& g;
  std::vector<int> parent;
  std::vector<int> state;  // 0 unvisited, 1 active, 2 done
  std::vector<int> cycle;  // simple vertex cycle once found

  explicit CycleDfs(const BipartiteSupportGraph& graph)
      : g(graph), parent(graph.nx + graph.ny, -1), state(graph.nx + graph.ny, 0) {}

  std::vector<int> neighbours(int v) const {
    std::vector<int> out;
    if (v < g.nx)
      for (int y : g.adj_x[v]) out.push_back(g.nx + y);
    else
      for (int x : g.adj_y[v - g.nx]) out.push_back(x);
    return out;
  }

  bool run(int v) {
    state[v] = 1;
    for (int w : neighbours(v)) {
      if (w == parent[v]) continue;
      if (state[w] == 1) {
        // Back edge: ancestors of v down to w form the cycle.
        for (int t = v; t != w; t = parent[t]) cycle.push_back(t);
        cycle.push_back(w);
        return true;
      }
      if (state[w] == 0) {
        parent[w] = v;
        if (run(w)) return true;
      }
    }
    state[v] = 2;
    return false;
  }
};

}  // namespace

std::optional<CycleWitness> find_cycle(const JointPmf& p) {
  const auto g = build_bipartite(p);
  CycleDfs dfs(g);
  for (int v = 0; v < g.nx + g.ny; ++v) {
    if (dfs.state[v] != 0) continue;
    if (dfs.run(v)) break;
  }
  if (dfs.cycle.empty()) return std::nullopt;
  // Rotate so the list starts at a y vertex; bipartite cycles alternate sides.
  std::vector<int> c = dfs.cycle;
  if (c[0] < g.nx) std::rotate(c.begin(), c.begin() + 1, c.end());
  CycleWitness w;
  // Vertex order [y1, x1, y2, x2, ...]: edge y_i-x_i is cell (x_i, y_i) and
  // edge x_i-y_{i+1} is cell (x_i, y_{i+1}).
  for (size_t i = 0; i < c.size(); i += 2) {
    w.ys.push_back(c[i] - g.nx);
    w.xs.push_back(c[i + 1]);
  }
  return w;
}

ConfusabilityGraph confusability_graph(const JointPmf& p) {
  ConfusabilityGraph g;
  g.n = p.nx();
  g.adj.assign(g.n, std::vector<bool>(g.n, false));
  for (int y = 0; y < p.ny(); ++y)
    for (int x1 = 0; x1 < g.n; ++x1) {
      if (p.at(x1, y) <= k_support_eps) continue;
      for (int x2 = x1 + 1; x2 < g.n; ++x2)
        if (p.at(x2, y) > k_support_eps) {
          g.adj[x1][x2] = true;
          g.adj[x2][x1] = true;
        }
    }
  return g;
}

namespace {

void bron_kerbosch(const std::vector<std::vector<bool>>& adj, std::vector<int>& R,
                   std::vector<int> P, std::vector<int> X,
                   std::vector<std::vector<int>>& out) {
  if (P.empty() && X.empty()) {
    out.push_back(R);
    return;
  }
  // Pivot on the vertex of P u X with most neighbours in P.
  int pivot = -1, best = -1;
  for (int v : P) {
    int d = 0;
    for (int w : P)
      if (adj[v][w]) ++d;
    if (d > best) {
      best = d;
      pivot = v;
    }
  }
  for (int v : X) {
    int d = 0;
    for (int w : P)
      if (adj[v][w]) ++d;
    if (d > best) {
      best = d;
      pivot = v;
    }
  }
  std::vector<int> candidates;
  for (int v : P)
    if (pivot == -1 || !adj[pivot][v]) candidates.push_back(v);
  for (int v : candidates) {
    std::vector<int> P2, X2;
    for (int w : P)
      if (adj[v][w]) P2.push_back(w);
    for (int w : X)
      if (adj[v][w]) X2.push_back(w);
    R.push_back(v);
    bron_kerbosch(adj, R, std::move(P2), std::move(X2), out);
    R.pop_back();
    P.erase(std::find(P.begin(), P.end(), v));
    X.push_back(v);
  }
}

}  // namespace

std::vector<std::vector<int>> independent_sets(const ConfusabilityGraph& g,
                                               int vertex_cap) {
  if (g.n > vertex_cap)
    fail(errc::graph_too_large,
         "confusability graph has " + std::to_string(g.n) + " vertices, cap " +
             std::to_string(vertex_cap));
  // Maximal independent sets of g = maximal cliques of the complement.
  std::vector<std::vector<bool>> comp(g.n, std::vector<bool>(g.n, false));
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (i != j && !g.adj[i][j]) comp[i][j] = true;
  std::vector<std::vector<int>> out;
  std::vector<int> R, P, X;
  for (int i = 0; i < g.n; ++i) P.push_back(i);
  bron_kerbosch(comp, R, std::move(P), std::move(X), out);
  for (auto& s : out) std::sort(s.begin(), s.end());
  std::sort(out.begin(), out.end());
  return out;
}

MaxConditionResult max_condition_check(const JointPmf& p, double tol) {
  MaxConditionResult r;
  const auto mx = p.marginal_x();
  const auto my = p.marginal_y();
  r.entropy_gap = std::fabs(entropy_bits(mx) - entropy_bits(my));
  r.worst_pair_gap = 0.0;
  for (int x = 0; x < p.nx(); ++x)
    for (int y = 0; y < p.ny(); ++y)
      if (p.at(x, y) > k_support_eps)
        r.worst_pair_gap = std::max(r.worst_pair_gap, std::fabs(mx[x] - my[y]));
  r.holds = r.entropy_gap <= tol && r.worst_pair_gap <= tol;
  return r;
}

}  // namespace egw
