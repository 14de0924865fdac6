#include "egw/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <thread>

#include "egw/errors.hpp"
#include "egw/graph.hpp"

namespace egw {

namespace {

constexpr double k_ln2 = 0.6931471805599453;
constexpr double k_tiny = 1e-300;

double clamped_log2_ratio(double num, double den) {
  const double r = std::log2(std::max(num, k_tiny) / std::max(den, k_tiny));
  return std::min(60.0, std::max(-60.0, r));
}

// Euclidean projection of w onto the probability simplex.
void project_simplex(std::vector<double>& w) {
  static thread_local std::vector<double> sorted;
  sorted.assign(w.begin(), w.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cum = 0.0, tau = 0.0;
  int k = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cum += sorted[i];
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (sorted[i] - t > 0.0) {
      tau = t;
      k = static_cast<int>(i) + 1;
    }
  }
  if (k == 0) {  // all entries tiny/degenerate: fall back to uniform
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
    return;
  }
  for (double& v : w) v = std::max(0.0, v - tau);
  double s = 0.0;
  for (double v : w) s += v;
  for (double& v : w) v /= s;
}

// How the channel rows are tied together: exact Markov structure is encoded
// by sharing one row across a group of cells instead of penalizing.
enum class ParamMode { full, by_x, by_y, constant };

// residual = coef . (v_X, v_Y, v_XY, H(U)) + constant; nonnegative by the
// chain-rule identities, so the penalty is smooth (no hinge needed).
struct PenaltyTerm {
  std::array<double, 4> coef;
  double constant;
  Structural which;
};

struct Stats {
  double vx = 0, vy = 0, vxy = 0, hu = 0;
  MiPoint v() const { return MiPoint{vx, vy, vxy}; }
};

struct RestartOutcome {
  bool valid = false;
  double value = 0.0;  // true objective at the final witness
  MiPoint v;
  Channel witness;
  std::map<std::string, double> residuals;
  double feasibility = 0.0;
  int iterations = 0;
  int index = 0;
};

struct Problem {
  const JointPmf* p = nullptr;
  GeneralObjective obj;
  std::vector<Structural> structural;
  std::vector<LinearConstraint> linear;
  OptimizerConfig cfg;
};

ParamMode mode_for(const std::vector<Structural>& st) {
  bool by_y = false, by_x = false;
  for (Structural s : st) {
    if (s == Structural::markov_x_y_u || s == Structural::zero_hu_given_y) by_y = true;
    if (s == Structural::markov_u_x_y || s == Structural::zero_hu_given_x) by_x = true;
  }
  if (by_x && by_y) return ParamMode::constant;
  if (by_y) return ParamMode::by_y;
  if (by_x) return ParamMode::by_x;
  return ParamMode::full;
}

bool handled_by_mode(Structural s, ParamMode m) {
  switch (s) {
    case Structural::markov_x_y_u:
      return m == ParamMode::by_y || m == ParamMode::constant;
    case Structural::markov_u_x_y:
      return m == ParamMode::by_x || m == ParamMode::constant;
    default:
      return false;
  }
}

// Residual functional of each structural constraint in the affine basis
// (v_X, v_Y, v_XY, H(U)); constants depend only on the input pmf.
PenaltyTerm penalty_for(Structural s, const JointPmf& p) {
  switch (s) {
    case Structural::u_indep_x:
      return {{1, 0, 0, 0}, 0.0, s};
    case Structural::u_indep_y:
      return {{0, 1, 0, 0}, 0.0, s};
    case Structural::markov_x_y_u:
      return {{0, -1, 1, 0}, 0.0, s};
    case Structural::markov_u_x_y:
      return {{-1, 0, 1, 0}, 0.0, s};
    case Structural::markov_x_u_y:
      return {{-1, -1, 1, 0}, p.mutual_information(), s};
    case Structural::zero_hx_given_yu:
      return {{0, 1, -1, 0}, p.hx_given_y(), s};
    case Structural::zero_hy_given_xu:
      return {{1, 0, -1, 0}, p.hy_given_x(), s};
    case Structural::zero_hu_given_x:
      return {{-1, 0, 0, 1}, 0.0, s};
    case Structural::zero_hu_given_y:
      return {{0, -1, 0, 1}, 0.0, s};
  }
  fail(errc::invalid_argument, "unknown structural constraint");
}

double hinge_violation(const LinearConstraint& lc, const MiPoint& v) {
  const double lhs = lc.a[0] * v.vx + lc.a[1] * v.vy + lc.a[2] * v.vxy;
  if (lc.rel < 0) return std::max(0.0, lhs - lc.r);
  if (lc.rel > 0) return std::max(0.0, lc.r - lhs);
  return std::abs(lhs - lc.r);
}

// ============================================================
// Blockwise ascent engine
// ============================================================

struct Engine {
  const JointPmf* p;
  int nx, ny, u;
  ParamMode mode;
  const Problem* prob;
  std::vector<PenaltyTerm> penalties;  // only those not handled by the mode

  std::vector<double> pxy;            // cells, row-major
  std::vector<double> px, py;
  std::vector<std::vector<int>> groups;  // live cells per parameter group
  std::vector<double> group_mass;

  std::vector<double> q;              // cells x u
  std::vector<double> pu, pxu, pyu;   // marginals of the lifted joint

  Engine(const Problem& pr, int u_size) : p(pr.p), prob(&pr) {
    nx = static_cast<int>(p->x_labels.size());
    ny = static_cast<int>(p->y_labels.size());
    u = u_size;
    mode = mode_for(pr.structural);
    for (Structural s : pr.structural)
      if (!handled_by_mode(s, mode)) penalties.push_back(penalty_for(s, *p));

    pxy.resize(static_cast<std::size_t>(nx) * ny);
    for (int x = 0; x < nx; ++x)
      for (int y = 0; y < ny; ++y) pxy[static_cast<std::size_t>(x) * ny + y] = p->at(x, y);
    px = p->marginal_x();
    py = p->marginal_y();

    const int ngroups = mode == ParamMode::full  ? nx * ny
                        : mode == ParamMode::by_x ? nx
                        : mode == ParamMode::by_y ? ny
                                                  : 1;
    groups.resize(ngroups);
    group_mass.assign(ngroups, 0.0);
    for (int x = 0; x < nx; ++x)
      for (int y = 0; y < ny; ++y) {
        const int c = x * ny + y;
        if (pxy[c] <= k_support_eps) continue;  // dead cells never updated
        const int g = mode == ParamMode::full  ? c
                      : mode == ParamMode::by_x ? x
                      : mode == ParamMode::by_y ? y
                                                : 0;
        groups[g].push_back(c);
        group_mass[g] += pxy[c];
      }

    q.assign(static_cast<std::size_t>(nx) * ny * u, 1.0 / u);
    pu.resize(u);
    pxu.resize(static_cast<std::size_t>(nx) * u);
    pyu.resize(static_cast<std::size_t>(ny) * u);
    recompute();
  }

  void set_rows(const std::vector<double>& rows) {  // cells x u, will be grouped
    q = rows;
    enforce_mode();
    recompute();
  }

  // Average rows within each group (weights p(x,y)) so grouped modes start
  // from the natural projection of an arbitrary seed.
  void enforce_mode() {
    if (mode == ParamMode::full) return;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (groups[g].empty()) continue;
      std::vector<double> avg(u, 0.0);
      for (int c : groups[g])
        for (int k = 0; k < u; ++k) avg[k] += pxy[c] * q[static_cast<std::size_t>(c) * u + k];
      double s = 0.0;
      for (double a : avg) s += a;
      if (s <= 0) std::fill(avg.begin(), avg.end(), 1.0 / u);
      else
        for (double& a : avg) a /= s;
      for (int c : groups[g])
        for (int k = 0; k < u; ++k) q[static_cast<std::size_t>(c) * u + k] = avg[k];
    }
  }

  void recompute() {
    std::fill(pu.begin(), pu.end(), 0.0);
    std::fill(pxu.begin(), pxu.end(), 0.0);
    std::fill(pyu.begin(), pyu.end(), 0.0);
    for (int x = 0; x < nx; ++x)
      for (int y = 0; y < ny; ++y) {
        const int c = x * ny + y;
        if (pxy[c] <= 0) continue;
        for (int k = 0; k < u; ++k) {
          const double w = pxy[c] * q[static_cast<std::size_t>(c) * u + k];
          pu[k] += w;
          pxu[static_cast<std::size_t>(x) * u + k] += w;
          pyu[static_cast<std::size_t>(y) * u + k] += w;
        }
      }
  }

  Stats stats() const {
    Stats s;
    for (int x = 0; x < nx; ++x)
      for (int k = 0; k < u; ++k) {
        const double w = pxu[static_cast<std::size_t>(x) * u + k];
        if (w > k_tiny && pu[k] > k_tiny && px[x] > k_tiny)
          s.vx += w * std::log2(w / (px[x] * pu[k]));
      }
    for (int y = 0; y < ny; ++y)
      for (int k = 0; k < u; ++k) {
        const double w = pyu[static_cast<std::size_t>(y) * u + k];
        if (w > k_tiny && pu[k] > k_tiny && py[y] > k_tiny)
          s.vy += w * std::log2(w / (py[y] * pu[k]));
      }
    for (int c = 0; c < nx * ny; ++c) {
      if (pxy[c] <= 0) continue;
      for (int k = 0; k < u; ++k) {
        const double qc = q[static_cast<std::size_t>(c) * u + k];
        if (qc > k_tiny && pu[k] > k_tiny) s.vxy += pxy[c] * qc * std::log2(qc / pu[k]);
      }
    }
    for (int k = 0; k < u; ++k)
      if (pu[k] > k_tiny) s.hu -= pu[k] * std::log2(pu[k]);
    return s;
  }

  double penalized(const Stats& s, double mu, double* true_value = nullptr) const {
    const MiPoint v = s.v();
    const double base = prob->obj.value(v);
    if (true_value) *true_value = base;
    double pen = 0.0;
    for (const PenaltyTerm& t : penalties)
      pen += std::max(0.0, t.coef[0] * s.vx + t.coef[1] * s.vy + t.coef[2] * s.vxy +
                               t.coef[3] * s.hu + t.constant);
    for (const LinearConstraint& lc : prob->linear) pen += hinge_violation(lc, v);
    return base - mu * pen;
  }

  // Gradient of the penalized objective w.r.t. the shared row of group g,
  // preconditioned by the group mass.
  void row_gradient(int g, double mu, std::vector<double>& grad) const {
    const Stats s = stats();
    const MiPoint v = s.v();
    const std::array<double, 3> og = prob->obj.grad(v);
    std::array<double, 4> c4 = {og[0], og[1], og[2], 0.0};
    for (const PenaltyTerm& t : penalties) {
      const double res = t.coef[0] * s.vx + t.coef[1] * s.vy + t.coef[2] * s.vxy +
                         t.coef[3] * s.hu + t.constant;
      if (res > 1e-15)
        for (int i = 0; i < 4; ++i) c4[i] -= mu * t.coef[i];
    }
    for (const LinearConstraint& lc : prob->linear) {
      const double lhs = lc.a[0] * v.vx + lc.a[1] * v.vy + lc.a[2] * v.vxy;
      double sign = 0.0;
      if (lc.rel < 0 && lhs - lc.r > 1e-15) sign = 1.0;
      if (lc.rel > 0 && lc.r - lhs > 1e-15) sign = -1.0;
      if (lc.rel == 0 && std::abs(lhs - lc.r) > 1e-15) sign = lhs > lc.r ? 1.0 : -1.0;
      if (sign != 0.0)
        for (int i = 0; i < 3; ++i) c4[i] -= mu * sign * lc.a[i];
    }
    grad.assign(u, 0.0);
    for (int c : groups[g]) {
      const int x = c / ny, y = c % ny;
      const double m = pxy[c];
      for (int k = 0; k < u; ++k) {
        double gk = 0.0;
        if (c4[0] != 0.0)
          gk += c4[0] * clamped_log2_ratio(pxu[static_cast<std::size_t>(x) * u + k],
                                           px[x] * pu[k]);
        if (c4[1] != 0.0)
          gk += c4[1] * clamped_log2_ratio(pyu[static_cast<std::size_t>(y) * u + k],
                                           py[y] * pu[k]);
        if (c4[2] != 0.0)
          gk += c4[2] * clamped_log2_ratio(q[static_cast<std::size_t>(c) * u + k], pu[k]);
        if (c4[3] != 0.0)
          gk += c4[3] * (-std::log2(std::max(pu[k], k_tiny)) - 1.0 / k_ln2);
        grad[k] += m * gk;
      }
    }
    const double gm = std::max(group_mass[g], 1e-12);
    for (double& gk : grad) gk /= gm;
  }

  // One pass over all groups with backtracking line search; returns the
  // objective gain of the pass.
  double sweep(double mu) {
    static thread_local std::vector<double> grad, cand, saved;
    double j_cur = penalized(stats(), mu);
    const double j_start = j_cur;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (groups[g].empty()) continue;
      row_gradient(static_cast<int>(g), mu, grad);
      const int c0 = groups[g][0];
      cand.assign(q.begin() + static_cast<std::size_t>(c0) * u,
                  q.begin() + static_cast<std::size_t>(c0 + 1) * u);
      saved = cand;
      double eta = 4.0;
      for (int bt = 0; bt < 14; ++bt, eta *= 0.25) {
        for (int k = 0; k < u; ++k) cand[k] = saved[k] + eta * grad[k];
        project_simplex(cand);
        apply_row(static_cast<int>(g), cand);
        const double j_new = penalized(stats(), mu);
        if (j_new > j_cur + 1e-13 * (1.0 + std::abs(j_cur))) {
          j_cur = j_new;
          break;
        }
        apply_row(static_cast<int>(g), saved);  // revert
      }
    }
    recompute();
    return j_cur - j_start;
  }

  void apply_row(int g, const std::vector<double>& row) {
    for (int c : groups[g])
      std::copy(row.begin(), row.end(), q.begin() + static_cast<std::size_t>(c) * u);
    recompute();
  }

  Channel channel() const {
    Channel c;
    c.nx = nx;
    c.ny = ny;
    c.u_size = u;
    c.q = q;
    return c;
  }
};

// ============================================================
// Polish projections
// ============================================================

// Alternating row shifts q += p(u) - p(u|x) enforce U independent of X
// without moving p(u); clamping handles rows pushed below zero.
void polish_independence(Engine& e, bool need_x, bool need_y) {
  for (int round = 0; round < 64; ++round) {
    double res = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
      const bool do_x = pass == 0 ? need_x : need_y;
      if (!do_x) continue;
      const bool on_x = pass == 0;
      const int n = on_x ? e.nx : e.ny;
      const std::vector<double>& marg = on_x ? e.px : e.py;
      const std::vector<double>& pzu = on_x ? e.pxu : e.pyu;
      std::vector<double> shift(static_cast<std::size_t>(n) * e.u, 0.0);
      for (int z = 0; z < n; ++z)
        for (int k = 0; k < e.u; ++k) {
          if (marg[z] <= k_support_eps) continue;
          shift[static_cast<std::size_t>(z) * e.u + k] =
              e.pu[k] - pzu[static_cast<std::size_t>(z) * e.u + k] / marg[z];
        }
      for (int x = 0; x < e.nx; ++x)
        for (int y = 0; y < e.ny; ++y) {
          const int c = x * e.ny + y;
          if (e.pxy[c] <= 0) continue;
          const int z = on_x ? x : y;
          double s = 0.0;
          for (int k = 0; k < e.u; ++k) {
            double& qc = e.q[static_cast<std::size_t>(c) * e.u + k];
            qc = std::max(0.0, qc + shift[static_cast<std::size_t>(z) * e.u + k]);
            s += qc;
          }
          if (s <= 0) s = 1.0;
          for (int k = 0; k < e.u; ++k) e.q[static_cast<std::size_t>(c) * e.u + k] /= s;
        }
      e.recompute();
    }
    const Stats s = e.stats();
    if (need_x) res = std::max(res, std::abs(s.vx));
    if (need_y) res = std::max(res, std::abs(s.vy));
    if (res < 1e-13) break;
  }
}

// Round a y-grouped (x-grouped) channel to the deterministic map
// y -> argmax q(u|y), making H(U|Y) exactly zero.
void polish_rounding(Engine& e, bool on_y) {
  const int n = on_y ? e.ny : e.nx;
  for (int z = 0; z < n; ++z) {
    int c0 = -1;
    for (int x = 0; x < e.nx && c0 < 0; ++x)
      for (int y = 0; y < e.ny && c0 < 0; ++y)
        if ((on_y ? y : x) == z && e.pxy[x * e.ny + y] > 0) c0 = x * e.ny + y;
    if (c0 < 0) continue;
    int best = 0;
    for (int k = 1; k < e.u; ++k)
      if (e.q[static_cast<std::size_t>(c0) * e.u + k] >
          e.q[static_cast<std::size_t>(c0) * e.u + best])
        best = k;
    for (int x = 0; x < e.nx; ++x)
      for (int y = 0; y < e.ny; ++y) {
        if ((on_y ? y : x) != z) continue;
        const int c = x * e.ny + y;
        for (int k = 0; k < e.u; ++k)
          e.q[static_cast<std::size_t>(c) * e.u + k] = k == best ? 1.0 : 0.0;
      }
  }
  e.recompute();
}

// ============================================================
// Seeds
// ============================================================

std::vector<double> rows_from_channel(const Channel& c, int nx, int ny, int u) {
  std::vector<double> rows(static_cast<std::size_t>(nx) * ny * u, 0.0);
  for (int cell = 0; cell < nx * ny; ++cell) {
    for (int k = 0; k < c.u_size; ++k)
      rows[static_cast<std::size_t>(cell) * u + (k % u)] +=
          c.q[static_cast<std::size_t>(cell) * c.u_size + k];
    double s = 0.0;
    for (int k = 0; k < u; ++k) s += rows[static_cast<std::size_t>(cell) * u + k];
    if (s <= 0) {
      for (int k = 0; k < u; ++k) rows[static_cast<std::size_t>(cell) * u + k] = 1.0 / u;
    } else {
      for (int k = 0; k < u; ++k) rows[static_cast<std::size_t>(cell) * u + k] /= s;
    }
  }
  return rows;
}

std::vector<double> deterministic_rows(int nx, int ny, int u,
                                       const std::vector<int>& cell_to_u) {
  std::vector<double> rows(static_cast<std::size_t>(nx) * ny * u, 0.0);
  for (int c = 0; c < nx * ny; ++c)
    rows[static_cast<std::size_t>(c) * u + (cell_to_u[c] % u)] = 1.0;
  return rows;
}

// Set partitions of the live cells in restricted-growth-string order,
// capped; dead cells are assigned block 0.
void partition_seeds(const JointPmf& p, int u, int cap,
                     std::vector<std::vector<double>>& out) {
  const int nx = static_cast<int>(p.x_labels.size());
  const int ny = static_cast<int>(p.y_labels.size());
  std::vector<int> live;
  for (int c = 0; c < nx * ny; ++c)
    if (p.p[c] > k_support_eps) live.push_back(c);
  const int n = static_cast<int>(live.size());
  if (n == 0 || n > 24) return;
  std::vector<int> a(n, 0);
  std::vector<int> assign(static_cast<std::size_t>(nx) * ny, 0);
  int emitted = 0;
  std::function<void(int, int)> rec = [&](int i, int m) {
    if (emitted >= cap) return;
    if (i == n) {
      std::fill(assign.begin(), assign.end(), 0);
      for (int j = 0; j < n; ++j) assign[live[j]] = a[j];
      out.push_back(deterministic_rows(nx, ny, u, assign));
      ++emitted;
      return;
    }
    const int lim = std::min(m + 1, u - 1);
    for (int v = 0; v <= lim && emitted < cap; ++v) {
      a[i] = v;
      rec(i + 1, std::max(m, v));
    }
  };
  rec(0, 0);
}

std::vector<std::vector<double>> build_seeds(const Problem& pr, int u) {
  const JointPmf& p = *pr.p;
  const int nx = static_cast<int>(p.x_labels.size());
  const int ny = static_cast<int>(p.y_labels.size());
  std::vector<std::vector<double>> seeds;
  for (const Channel& c : pr.cfg.extra_seeds) {
    if (c.nx != nx || c.ny != ny) continue;
    Channel pruned = prune_channel(p, c);
    seeds.push_back(rows_from_channel(pruned, nx, ny, u));
  }
  seeds.push_back(std::vector<double>(static_cast<std::size_t>(nx) * ny * u, 1.0 / u));
  std::vector<int> map_x(static_cast<std::size_t>(nx) * ny), map_y(map_x.size()),
      map_xy(map_x.size());
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) {
      map_x[x * ny + y] = x;
      map_y[x * ny + y] = y;
      map_xy[x * ny + y] = x * ny + y;
    }
  seeds.push_back(deterministic_rows(nx, ny, u, map_x));
  seeds.push_back(deterministic_rows(nx, ny, u, map_y));
  seeds.push_back(deterministic_rows(nx, ny, u, map_xy));
  const ComponentLabeling comp = support_components(p);
  if (comp.count >= 2) {
    std::vector<int> map_c(static_cast<std::size_t>(nx) * ny, 0);
    for (int x = 0; x < nx; ++x)
      for (int y = 0; y < ny; ++y)
        map_c[x * ny + y] = comp.x_comp[x] >= 0 ? comp.x_comp[x]
                            : comp.y_comp[y] >= 0 ? comp.y_comp[y]
                                                  : 0;
    seeds.push_back(deterministic_rows(nx, ny, u, map_c));
  }
  partition_seeds(p, u, 240, seeds);
  return seeds;
}

// ============================================================
// Restart orchestration
// ============================================================

std::map<std::string, double> residuals_at(const Problem& pr, const TriplePmf& t) {
  std::map<std::string, double> r;
  for (Structural s : pr.structural) {
    double val = 0.0;
    switch (s) {
      case Structural::u_indep_x: val = t.ixu(); break;
      case Structural::u_indep_y: val = t.iyu(); break;
      case Structural::markov_x_y_u: val = t.ix_u_given_y(); break;
      case Structural::markov_u_x_y: val = t.iy_u_given_x(); break;
      case Structural::markov_x_u_y: val = t.ixy_given_u(); break;
      case Structural::zero_hx_given_yu: val = t.hx_given_yu(); break;
      case Structural::zero_hy_given_xu: val = t.hy_given_xu(); break;
      case Structural::zero_hu_given_x: val = t.hu_given_x(); break;
      case Structural::zero_hu_given_y: val = t.hu_given_y(); break;
    }
    r[structural_name(s)] = val;
  }
  const MiPoint v = t.mi_point();
  for (std::size_t i = 0; i < pr.linear.size(); ++i)
    r["linear_" + std::to_string(i)] = hinge_violation(pr.linear[i], v);
  return r;
}

RestartOutcome evaluate_witness(const Problem& pr, const Channel& c, int index) {
  RestartOutcome out;
  out.valid = true;
  out.index = index;
  out.witness = prune_channel(*pr.p, c);
  const TriplePmf t = extend(*pr.p, out.witness);
  out.v = t.mi_point();
  out.value = pr.obj.value(out.v);
  out.residuals = residuals_at(pr, t);
  out.feasibility = 0.0;
  for (const auto& kv : out.residuals)
    out.feasibility = std::max(out.feasibility, std::max(0.0, kv.second));
  return out;
}

// feasibility-first ordering used to merge restarts (and polish variants).
bool better(const RestartOutcome& a, const RestartOutcome& b, double feas_tol) {
  if (!b.valid) return true;
  if (!a.valid) return false;
  const bool fa = a.feasibility <= feas_tol, fb = b.feasibility <= feas_tol;
  if (fa != fb) return fa;
  if (!fa) {  // both infeasible: approach feasibility first
    if (std::abs(a.feasibility - b.feasibility) > 1e-12)
      return a.feasibility < b.feasibility;
  }
  if (std::abs(a.value - b.value) > 1e-9) return a.value > b.value;
  if (a.witness.u_size != b.witness.u_size) return a.witness.u_size < b.witness.u_size;
  return a.index < b.index;
}

RestartOutcome run_restart(const Problem& pr, int u, const std::vector<double>* seed,
                           int index) {
  Engine e(pr, u);
  RestartOutcome seeded_start;
  if (seed) {
    e.set_rows(*seed);
    // The penalty sweeps may walk away from a seed that is already optimal
    // (low-mu stages reward constraint-violating moves); keep the start
    // itself as a candidate so a feasible seed is never lost.
    seeded_start = evaluate_witness(pr, e.channel(), index);
  } else {
    Rng rng(restart_seed(pr.cfg.seed, index));
    std::vector<double> rows(static_cast<std::size_t>(e.nx) * e.ny * u);
    std::vector<double> row(u);
    for (int c = 0; c < e.nx * e.ny; ++c) {
      row = rng.dirichlet(u);
      std::copy(row.begin(), row.end(), rows.begin() + static_cast<std::size_t>(c) * u);
    }
    e.set_rows(rows);
  }

  const bool has_pen = !e.penalties.empty() || !pr.linear.empty();
  std::vector<double> schedule = has_pen ? pr.cfg.penalty_schedule : std::vector<double>{1.0};
  if (schedule.empty()) schedule = {1.0};
  int iters = 0;
  for (double mu : schedule) {
    int flat = 0;
    for (int it = 0; it < pr.cfg.max_iterations; ++it) {
      const double gain = e.sweep(mu);
      ++iters;
      const double j = e.penalized(e.stats(), mu);
      if (gain < pr.cfg.objective_tol * (1.0 + std::abs(j))) {
        if (++flat >= 2) break;
      } else {
        flat = 0;
      }
    }
  }

  RestartOutcome best = evaluate_witness(pr, e.channel(), index);
  best.iterations = iters;
  if (seed && better(seeded_start, best, pr.cfg.constraint_tol)) {
    seeded_start.iterations = iters;
    best = seeded_start;
  }

  bool need_x = false, need_y = false, round_y = false, round_x = false;
  for (Structural s : pr.structural) {
    if (s == Structural::u_indep_x) need_x = true;
    if (s == Structural::u_indep_y) need_y = true;
    if (s == Structural::zero_hu_given_y) round_y = true;
    if (s == Structural::zero_hu_given_x) round_x = true;
  }
  if ((need_x || need_y) && e.mode == ParamMode::full) {
    polish_independence(e, need_x, need_y);
    RestartOutcome polished = evaluate_witness(pr, e.channel(), index);
    polished.iterations = iters;
    if (better(polished, best, pr.cfg.constraint_tol)) best = polished;
  }
  if (round_y || round_x) {
    polish_rounding(e, round_y);
    RestartOutcome rounded = evaluate_witness(pr, e.channel(), index);
    rounded.iterations = iters;
    if (better(rounded, best, pr.cfg.constraint_tol)) best = rounded;
  }
  return best;
}

SolveResult run_problem(const Problem& pr, std::vector<RestartOutcome>* pool_out) {
  const JointPmf& p = *pr.p;
  const int nx = static_cast<int>(p.x_labels.size());
  const int ny = static_cast<int>(p.y_labels.size());
  int u = pr.cfg.u_size > 0 ? pr.cfg.u_size : nx * ny + 2;
  if (!pr.cfg.allow_large_u) u = std::min(u, nx * ny + 2);
  if (u < 1) fail(errc::invalid_argument, "u_size must be positive");
  const int restarts = std::max(1, pr.cfg.restarts);

  const std::vector<std::vector<double>> seeds = build_seeds(pr, u);
  std::vector<RestartOutcome> outcomes(restarts);
  const int threads = std::max(1, pr.cfg.threads);
  auto work = [&](int t) {
    for (int i = t; i < restarts; i += threads) {
      const std::vector<double>* seed =
          i < static_cast<int>(seeds.size()) ? &seeds[i] : nullptr;
      outcomes[i] = run_restart(pr, u, seed, i);
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (std::thread& th : pool) th.join();
  }

  int best = 0;
  for (int i = 1; i < restarts; ++i)
    if (better(outcomes[i], outcomes[best], pr.cfg.constraint_tol)) best = i;

  SolveResult r;
  const RestartOutcome& b = outcomes[best];
  r.value = b.value;
  r.v = b.v;
  r.witness = b.witness;
  r.residuals = b.residuals;
  r.feasibility = b.feasibility;
  r.iterations = b.iterations;
  for (const RestartOutcome& o : outcomes)
    if (o.valid && o.feasibility <= pr.cfg.constraint_tol &&
        o.value >= b.value - 1e-6)
      ++r.restarts_at_best;
  r.converged = restarts == 1 || r.restarts_at_best >= 2;
  if (pool_out) *pool_out = std::move(outcomes);
  return r;
}

GeneralObjective linear_objective(std::array<double, 3> b) {
  GeneralObjective o;
  o.value = [b](const MiPoint& v) { return b[0] * v.vx + b[1] * v.vy + b[2] * v.vxy; };
  o.grad = [b](const MiPoint&) { return b; };
  return o;
}

}  // namespace

const char* structural_name(Structural s) {
  switch (s) {
    case Structural::u_indep_x: return "I(X;U)";
    case Structural::u_indep_y: return "I(Y;U)";
    case Structural::markov_x_y_u: return "I(X;U|Y)";
    case Structural::markov_u_x_y: return "I(Y;U|X)";
    case Structural::markov_x_u_y: return "I(X;Y|U)";
    case Structural::zero_hx_given_yu: return "H(X|Y,U)";
    case Structural::zero_hy_given_xu: return "H(Y|X,U)";
    case Structural::zero_hu_given_x: return "H(U|X)";
    case Structural::zero_hu_given_y: return "H(U|Y)";
  }
  return "?";
}

std::uint64_t restart_seed(std::uint64_t seed, int restart) {
  return seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(restart + 1);
}

SolveResult support_function(const JointPmf& p, const std::array<double, 3>& b,
                             const OptimizerConfig& cfg) {
  const double norm = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
  if (norm <= 0) {
    SolveResult r;
    r.witness = constant_channel(static_cast<int>(p.x_labels.size()),
                                 static_cast<int>(p.y_labels.size()));
    r.converged = true;
    return r;
  }
  Problem pr;
  pr.p = &p;
  pr.obj = linear_objective({b[0] / norm, b[1] / norm, b[2] / norm});
  pr.cfg = cfg;
  SolveResult r = run_problem(pr, nullptr);
  r.value *= norm;  // positive homogeneity: value reported in caller's scale
  return r;
}

SolveResult solve_constrained(const JointPmf& p, const ObjectiveSpec& obj,
                              const ConstraintSpec& cons, const OptimizerConfig& cfg) {
  Problem pr;
  pr.p = &p;
  pr.obj = linear_objective(obj.b);
  pr.structural = cons.structural;
  pr.linear = cons.linear;
  pr.cfg = cfg;
  SolveResult r = run_problem(pr, nullptr);
  if (r.feasibility > cfg.constraint_tol)
    fail(errc::infeasible, "no witness met the constraints (residual " +
                               std::to_string(r.feasibility) + ")");
  return r;
}

SolveResult solve_general(const JointPmf& p, const GeneralObjective& obj,
                          const ConstraintSpec& cons, const OptimizerConfig& cfg) {
  Problem pr;
  pr.p = &p;
  pr.obj = obj;
  pr.structural = cons.structural;
  pr.linear = cons.linear;
  pr.cfg = cfg;
  SolveResult r = run_problem(pr, nullptr);
  if ((!cons.structural.empty() || !cons.linear.empty()) &&
      r.feasibility > cfg.constraint_tol)
    fail(errc::infeasible, "no witness met the constraints (residual " +
                               std::to_string(r.feasibility) + ")");
  return r;
}

SolveResult directional_derivative(const JointPmf& p, const std::array<double, 3>& b,
                                   const std::array<double, 3>& c,
                                   const OptimizerConfig& cfg) {
  const double norm = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
  if (norm <= 0) fail(errc::invalid_argument, "zero direction");
  const std::array<double, 3> bn = {b[0] / norm, b[1] / norm, b[2] / norm};

  // Stage 1: locate the face value psi(b) and keep every restart's witness.
  Problem stage1;
  stage1.p = &p;
  stage1.obj = linear_objective(bn);
  stage1.cfg = cfg;
  std::vector<RestartOutcome> pool;
  const SolveResult first = run_problem(stage1, &pool);
  const double psi_hat = first.value;

  auto bdot = [&](const MiPoint& v) { return bn[0] * v.vx + bn[1] * v.vy + bn[2] * v.vxy; };
  auto cdot = [&](const MiPoint& v) { return c[0] * v.vx + c[1] * v.vy + c[2] * v.vxy; };

  // Stage 2: push along c inside the argmax face via increasing weights W.
  std::vector<double> weights = cfg.penalty_schedule;
  if (weights.empty()) weights = {1.0, 10.0, 100.0, 1000.0};
  Problem stage2;
  stage2.p = &p;
  stage2.cfg = cfg;
  stage2.cfg.extra_seeds.push_back(first.witness);
  for (const RestartOutcome& o : pool)
    if (o.valid && bdot(o.v) >= psi_hat - cfg.argmax_tol)
      stage2.cfg.extra_seeds.push_back(o.witness);

  std::vector<RestartOutcome> candidates;
  for (const RestartOutcome& o : pool)
    if (o.valid) candidates.push_back(o);
  for (double w : weights) {
    stage2.obj = linear_objective(
        {w * bn[0] + c[0], w * bn[1] + c[1], w * bn[2] + c[2]});
    std::vector<RestartOutcome> stage_pool;
    const SolveResult sr = run_problem(stage2, &stage_pool);
    stage2.cfg.extra_seeds.push_back(sr.witness);
    for (RestartOutcome& o : stage_pool)
      if (o.valid) candidates.push_back(std::move(o));
  }

  const RestartOutcome* pick = nullptr;
  for (const RestartOutcome& o : candidates) {
    if (bdot(o.v) < psi_hat - cfg.argmax_tol) continue;
    if (!pick || cdot(o.v) > cdot(pick->v) + 1e-12 ||
        (std::abs(cdot(o.v) - cdot(pick->v)) <= 1e-12 &&
         o.witness.u_size < pick->witness.u_size))
      pick = &o;
  }
  if (!pick) fail(errc::condition_not_met, "argmax face produced no candidates");

  SolveResult r;
  r.value = cdot(pick->v);
  r.v = pick->v;
  r.witness = pick->witness;
  r.residuals["argmax_gap"] = psi_hat - bdot(pick->v);
  r.feasibility = std::max(0.0, psi_hat - bdot(pick->v));
  r.converged = first.converged;
  r.restarts_at_best = first.restarts_at_best;
  r.iterations = first.iterations;
  return r;
}

// ============================================================
// Deterministic-channel enumeration and the exhaustive grid oracle
// ============================================================

std::vector<std::pair<Channel, MiPoint>> enumerate_deterministic(const JointPmf& p,
                                                                 int u_size,
                                                                 double enum_cap) {
  const int nx = static_cast<int>(p.x_labels.size());
  const int ny = static_cast<int>(p.y_labels.size());
  const int cells = nx * ny;
  if (u_size < 1) fail(errc::invalid_argument, "u_size must be positive");
  if (std::pow(static_cast<double>(u_size), cells) > enum_cap)
    fail(errc::enumeration_too_large, "deterministic enumeration exceeds the cap");

  std::vector<int> live;
  for (int c = 0; c < cells; ++c)
    if (p.p[c] > k_support_eps) live.push_back(c);
  const int n = static_cast<int>(live.size());
  std::vector<std::pair<Channel, MiPoint>> out;
  std::vector<int> a(std::max(n, 1), 0);
  std::vector<int> assign(cells, 0);
  // restricted-growth strings with at most u_size blocks
  std::function<void(int, int)> rec = [&](int i, int m) {
    if (i == n) {
      std::fill(assign.begin(), assign.end(), 0);
      for (int j = 0; j < n; ++j) assign[live[j]] = a[j];
      Channel c;
      c.nx = nx;
      c.ny = ny;
      c.u_size = std::max(1, std::min(u_size, m + 1));
      c.q.assign(static_cast<std::size_t>(cells) * c.u_size, 0.0);
      for (int cell = 0; cell < cells; ++cell)
        c.q[static_cast<std::size_t>(cell) * c.u_size + (assign[cell] % c.u_size)] = 1.0;
      out.emplace_back(c, mi_point_of(p, c));
      return;
    }
    const int lim = std::min(m + 1, u_size - 1);
    for (int v = 0; v <= lim; ++v) {
      a[i] = v;
      rec(i + 1, std::max(m, v));
    }
  };
  if (n == 0) {
    Channel c = constant_channel(nx, ny);
    out.emplace_back(c, mi_point_of(p, c));
  } else {
    rec(0, 0);
  }
  return out;
}

namespace {

// Binary entropy with a guarded lookup table: exact near the edges,
// linearly interpolated inside (error ~2e-10).
struct EntropyTable {
  static constexpr int k_bits = 20;
  static constexpr int k_n = 1 << k_bits;
  std::vector<double> h;
  EntropyTable() : h(k_n + 1) {
    for (int i = 0; i <= k_n; ++i)
      h[i] = binary_entropy(static_cast<double>(i) / k_n);
  }
  double operator()(double t) const {
    if (t <= 1e-3 || t >= 1.0 - 1e-3) return binary_entropy(t);
    const double s = t * k_n;
    const int i = static_cast<int>(s);
    const double f = s - i;
    return h[i] * (1.0 - f) + h[i + 1] * f;
  }
};

struct OracleEval {
  const JointPmf* p;
  const ObjectiveSpec* obj;
  std::vector<PenaltyTerm> terms;  // residual definitions (no objective role)
  const std::vector<LinearConstraint>* linear;
  const EntropyTable* table;
  std::vector<int> live;           // cells with mass
  std::vector<double> mass, px, py;
  std::vector<int> cx, cy;
  int nx, ny;

  Stats stats_at(const std::vector<double>& q0, bool exact) const {
    // binary U: everything reduces to binary entropies of u=0 weights
    double pu0 = 0.0;
    std::vector<double> pxu0(nx, 0.0), pyu0(ny, 0.0);
    for (std::size_t j = 0; j < live.size(); ++j) {
      const double w = mass[j] * q0[j];
      pu0 += w;
      pxu0[cx[j]] += w;
      pyu0[cy[j]] += w;
    }
    auto h = [&](double t) { return exact ? binary_entropy(t) : (*table)(t); };
    Stats s;
    s.hu = h(pu0);
    s.vx = s.hu;
    for (int x = 0; x < nx; ++x)
      if (px[x] > k_tiny) s.vx -= px[x] * h(pxu0[x] / px[x]);
    s.vy = s.hu;
    for (int y = 0; y < ny; ++y)
      if (py[y] > k_tiny) s.vy -= py[y] * h(pyu0[y] / py[y]);
    s.vxy = s.hu;
    for (std::size_t j = 0; j < live.size(); ++j) s.vxy -= mass[j] * h(q0[j]);
    return s;
  }

  double feas(const Stats& s) const {
    double worst = 0.0;
    for (const PenaltyTerm& t : terms)
      worst = std::max(worst, t.coef[0] * s.vx + t.coef[1] * s.vy + t.coef[2] * s.vxy +
                                  t.coef[3] * s.hu + t.constant);
    for (const LinearConstraint& lc : *linear)
      worst = std::max(worst, hinge_violation(lc, s.v()));
    return worst;
  }

  double value(const Stats& s) const {
    return obj->b[0] * s.vx + obj->b[1] * s.vy + obj->b[2] * s.vxy;
  }
};

}  // namespace

SolveResult grid_oracle(const JointPmf& p, const ObjectiveSpec& obj,
                        const ConstraintSpec& cons, int u_size, double step,
                        double feas_tol) {
  const int nx = static_cast<int>(p.x_labels.size());
  const int ny = static_cast<int>(p.y_labels.size());
  if (nx * ny > 4) fail(errc::oracle_too_large, "oracle supports at most 4 cells");
  if (u_size > 2 || u_size < 1) fail(errc::oracle_too_large, "oracle supports u_size <= 2");
  if (step < 0.005 - 1e-12) fail(errc::oracle_too_large, "oracle step below 0.005");

  static const EntropyTable table;
  OracleEval ev;
  ev.p = &p;
  ev.obj = &obj;
  ev.linear = &cons.linear;
  ev.table = &table;
  ev.nx = nx;
  ev.ny = ny;
  ev.px = p.marginal_x();
  ev.py = p.marginal_y();
  for (Structural s : cons.structural) ev.terms.push_back(penalty_for(s, p));
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y)
      if (p.at(x, y) > k_support_eps) {
        ev.live.push_back(x * ny + y);
        ev.mass.push_back(p.at(x, y));
        ev.cx.push_back(x);
        ev.cy.push_back(y);
      }

  const int dims = static_cast<int>(ev.live.size());

  // The admission band scales with the pitch by default: a pitch-h grid
  // straddles the constraint manifold at distance Theta(h), so the band must
  // admit those straddling points. Within-band relaxation biases the value
  // one way, discretization the other; both are O(pitch) and the reported
  // Lipschitz slack brackets their sum.
  const double band = feas_tol > 0.0 ? feas_tol : 0.15 * step;

  std::vector<double> grid_vals;
  if (u_size == 1) {
    grid_vals = {1.0};  // constant channel is the only |U|=1 point
  } else {
    const int steps = static_cast<int>(std::llround(1.0 / step)) + 1;
    for (int i = 0; i < steps; ++i) grid_vals.push_back(std::min(1.0, i * step));
  }
  const int steps = static_cast<int>(grid_vals.size());
  std::vector<double> q0(dims, 0.0);
  std::vector<double> best_q;
  double best_val = -1e300;
  bool found = false;

  std::vector<int> idx(dims, 0);
  while (true) {
    for (int d = 0; d < dims; ++d) q0[d] = grid_vals[idx[d]];
    const Stats s = ev.stats_at(q0, false);
    if (ev.feas(s) <= band) {
      const double val = ev.value(s);
      if (!found || val > best_val) {
        best_val = val;
        best_q = q0;
        found = true;
      }
    }
    int d = dims - 1;
    while (d >= 0 && ++idx[d] >= steps) idx[d--] = 0;
    if (d < 0) break;
  }
  if (!found)
    fail(errc::infeasible, "no grid point met the constraints at the given tolerance");

  // Exact re-evaluation at the winner plus a finite-difference Lipschitz slack.
  const Stats sb = ev.stats_at(best_q, true);
  double slack = 0.0;
  const double h = 1e-5;
  for (int d = 0; d < dims; ++d) {
    std::vector<double> qp = best_q, qm = best_q;
    qp[d] = std::min(1.0, qp[d] + h);
    qm[d] = std::max(0.0, qm[d] - h);
    const double fp = ev.value(ev.stats_at(qp, true));
    const double fm = ev.value(ev.stats_at(qm, true));
    slack += std::abs(fp - fm) / (qp[d] - qm[d]);
  }

  SolveResult r;
  r.value = ev.value(sb);
  r.v = sb.v();
  r.oracle_slack = step * slack;
  Channel c;
  c.nx = nx;
  c.ny = ny;
  c.u_size = 2;
  c.q.assign(static_cast<std::size_t>(nx) * ny * 2, 0.5);
  for (int d = 0; d < dims; ++d) {
    c.q[static_cast<std::size_t>(ev.live[d]) * 2] = best_q[d];
    c.q[static_cast<std::size_t>(ev.live[d]) * 2 + 1] = 1.0 - best_q[d];
  }
  r.witness = c;
  for (const PenaltyTerm& t : ev.terms)
    r.residuals[structural_name(t.which)] =
        t.coef[0] * sb.vx + t.coef[1] * sb.vy + t.coef[2] * sb.vxy +
        t.coef[3] * sb.hu + t.constant;
  for (std::size_t i = 0; i < cons.linear.size(); ++i)
    r.residuals["linear_" + std::to_string(i)] = hinge_violation(cons.linear[i], sb.v());
  for (const auto& kv : r.residuals)
    r.feasibility = std::max(r.feasibility, std::max(0.0, kv.second));
  r.converged = true;
  return r;
}

}  // namespace egw
