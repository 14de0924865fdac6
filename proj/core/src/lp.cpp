#include "egw/lp.hpp"

#include <cmath>
#include <limits>

namespace egw {

namespace {

constexpr double k_lp_eps = 1e-10;

// Dense tableau simplex on equality standard form with slack/artificial
// variables. Bland's rule prevents cycling; sizes here are tiny so the
// O(rows * cols) pivots are irrelevant.
struct Tableau {
  int m, n;                        // rows, structural+slack+artificial columns
  std::vector<std::vector<double>> a;  // m x n
  std::vector<double> b;           // m
  std::vector<double> cost;        // n
  std::vector<int> basis;          // m

  double objective() const {
    double v = 0.0;
    for (int i = 0; i < m; ++i) v += cost[basis[i]] * b[i];
    return v;
  }

  // Reduced cost of column j given current basis (explicit computation keeps
  // the implementation simple and adequately fast at this scale).
  bool iterate() {
    // Dantzig entering with largest-pivot tie-breaking keeps pivots away from
    // the near-parallel columns that duplicate hull generators produce; after
    // a generous budget the loop falls back to Bland's rule, whose
    // first-improving choice guarantees termination on degenerate vertices.
    int iters = 0;
    const int bland_after = 200 * (m + n);
    while (true) {
      const bool bland = ++iters > bland_after;
      int enter = -1;
      double best_rc = k_lp_eps;
      for (int j = 0; j < n; ++j) {
        double rc = cost[j];
        for (int i = 0; i < m; ++i) rc -= cost[basis[i]] * a[i][j];
        if (rc > best_rc) {
          enter = j;
          if (bland) break;
          best_rc = rc;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < m; ++i) {
        if (a[i][enter] > k_lp_eps) {
          const double ratio = b[i] / a[i][enter];
          if (leave < 0 || ratio < best_ratio - k_lp_eps) {
            best_ratio = ratio;
            leave = i;
          } else if (ratio <= best_ratio + k_lp_eps &&
                     (bland ? basis[i] < basis[leave]
                            : a[i][enter] > a[leave][enter])) {
            best_ratio = std::min(best_ratio, ratio);
            leave = i;
          }
        }
      }
      if (leave < 0) return false;  // unbounded
      pivot(leave, enter);
    }
  }

  void pivot(int r, int col) {
    const double piv = a[r][col];
    for (int j = 0; j < n; ++j) a[r][j] /= piv;
    b[r] /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == r) continue;
      const double f = a[i][col];
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) a[i][j] -= f * a[r][j];
      b[i] -= f * b[r];
    }
    basis[r] = col;
  }
};

}  // namespace

LpResult solve_lp(int nvars, const std::vector<double>& c,
                  const std::vector<LpRow>& rows) {
  const int m = static_cast<int>(rows.size());
  // Column layout: structural | slack (one per inequality) | artificial.
  int nslack = 0;
  for (const auto& r : rows)
    if (r.rel != 0) ++nslack;

  Tableau t;
  t.m = m;
  t.n = nvars + nslack + m;  // artificial for every row (simplicity)
  t.a.assign(m, std::vector<double>(t.n, 0.0));
  t.b.resize(m);
  t.basis.resize(m);

  int slack_at = nvars;
  for (int i = 0; i < m; ++i) {
    const auto& r = rows[i];
    double sign = 1.0;
    if (r.b < 0) sign = -1.0;  // keep rhs nonnegative
    for (int j = 0; j < nvars && j < static_cast<int>(r.a.size()); ++j)
      t.a[i][j] = sign * r.a[j];
    t.b[i] = sign * r.b;
    if (r.rel != 0) {
      // <= gets +slack, >= gets -slack (before sign flip).
      const double s = (r.rel < 0 ? 1.0 : -1.0) * sign;
      t.a[i][slack_at] = s;
      ++slack_at;
    }
    t.a[i][nvars + nslack + i] = 1.0;
    t.basis[i] = nvars + nslack + i;
  }

  // Phase 1: drive artificials to zero.
  t.cost.assign(t.n, 0.0);
  for (int i = 0; i < m; ++i) t.cost[nvars + nslack + i] = -1.0;
  if (!t.iterate()) return {LpStatus::infeasible, 0.0, {}};
  if (t.objective() < -1e-7) return {LpStatus::infeasible, 0.0, {}};

  // Pivot artificials still in the basis out; rows where that is impossible
  // are redundant (b ~ 0) and get dropped.
  for (int i = 0; i < t.m; ++i) {
    if (t.basis[i] < nvars + nslack) continue;
    int col = -1;
    for (int j = 0; j < nvars + nslack; ++j)
      if (std::fabs(t.a[i][j]) > k_lp_eps) {
        col = j;
        break;
      }
    if (col >= 0) t.pivot(i, col);
  }
  {
    Tableau clean;
    clean.n = nvars + nslack;
    for (int i = 0; i < t.m; ++i) {
      if (t.basis[i] >= nvars + nslack) continue;  // redundant row
      std::vector<double> row(t.a[i].begin(), t.a[i].begin() + clean.n);
      clean.a.push_back(std::move(row));
      clean.b.push_back(t.b[i]);
      clean.basis.push_back(t.basis[i]);
    }
    clean.m = static_cast<int>(clean.a.size());
    t = std::move(clean);
  }

  // Phase 2: real objective over structural + slack columns only.
  t.cost.assign(t.n, 0.0);
  for (int j = 0; j < nvars && j < static_cast<int>(c.size()); ++j) t.cost[j] = c[j];
  if (!t.iterate()) return {LpStatus::unbounded, 0.0, {}};

  LpResult res;
  res.status = LpStatus::optimal;
  res.x.assign(nvars, 0.0);
  for (int i = 0; i < t.m; ++i)
    if (t.basis[i] < nvars) res.x[t.basis[i]] = t.b[i];
  res.value = 0.0;
  for (int j = 0; j < nvars && j < static_cast<int>(c.size()); ++j)
    res.value += c[j] * res.x[j];
  return res;
}

}  // namespace egw
