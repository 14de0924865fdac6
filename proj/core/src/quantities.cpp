#include "egw/quantities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "egw/errors.hpp"
#include "egw/region.hpp"

namespace egw {

namespace {

// ============================================================
// Shared helpers
// ============================================================

// Penalty-enforced constraints settle near 1e-7; a 1e-9 feasibility gate
// would reject genuine optima, so quantity solves run with at least 1e-6.
OptimizerConfig tuned(const OptimizerConfig& cfg) {
  OptimizerConfig c = cfg;
  if (c.constraint_tol < 1e-6) c.constraint_tol = 1e-6;
  return c;
}

void merge_residuals(QuantityResult& qr, const SolveResult& res) {
  for (const auto& [k, v] : res.residuals) qr.residuals[k] = v;
  qr.residuals["feasibility"] = res.feasibility;
}

double interaction_value(const MiPoint& v) { return v.vxy - v.vx - v.vy; }

// ============================================================
// Isotonic cleanup (pool adjacent violators)
// ============================================================

std::vector<double> pava_nondecreasing(const std::vector<double>& v) {
  std::vector<double> sum;
  std::vector<int> cnt;
  for (double t : v) {
    sum.push_back(t);
    cnt.push_back(1);
    while (sum.size() >= 2) {
      const std::size_t k = sum.size() - 1;
      if (sum[k - 1] / cnt[k - 1] <= sum[k] / cnt[k] + 1e-15) break;
      sum[k - 1] += sum[k];
      cnt[k - 1] += cnt[k];
      sum.pop_back();
      cnt.pop_back();
    }
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t k = 0; k < sum.size(); ++k)
    out.insert(out.end(), cnt[k], sum[k] / cnt[k]);
  return out;
}

std::vector<double> pava_nonincreasing(const std::vector<double>& v) {
  std::vector<double> neg(v);
  for (double& t : neg) t = -t;
  std::vector<double> fit = pava_nondecreasing(neg);
  for (double& t : fit) t = -t;
  return fit;
}

}  // namespace

// ============================================================
// Wyner common information
// ============================================================

QuantityResult wyner_ci(const JointPmf& p, const OptimizerConfig& cfg0) {
  const OptimizerConfig cfg = tuned(cfg0);
  const SolveResult res =
      solve_constrained(p, {{0, 0, -1}}, {{Structural::markov_x_u_y}, {}}, cfg);
  QuantityResult qr;
  qr.name = "wyner_ci";
  qr.value = -res.value;
  qr.witness = res.witness;
  qr.method = "optimizer";
  qr.table1_form = "-psi'(1,1,-1; 0,0,-1)";
  merge_residuals(qr, res);
  const SolveResult dd = directional_derivative(p, {1, 1, -1}, {0, 0, -1}, cfg);
  qr.residuals["table1_value"] = -dd.value;
  qr.residuals["table1_gap"] = std::abs(qr.value - (-dd.value));
  return qr;
}

// ============================================================
// Gacs-Korner common information
// ============================================================

QuantityResult gacs_korner_ci(const JointPmf& p, const OptimizerConfig& cfg0) {
  const GacsKornerResult gk = gacs_korner(p);
  QuantityResult qr;
  qr.name = "gacs_korner_ci";
  qr.value = gk.value_bits;
  qr.witness = gk.witness;
  qr.method = "exact-graph";
  qr.table1_form = "psi'(1,1,-2; 0,0,1)";
  OptimizerConfig cfg = tuned(cfg0);
  cfg.extra_seeds.push_back(gk.witness);
  const SolveResult dd = directional_derivative(p, {1, 1, -2}, {0, 0, 1}, cfg);
  qr.residuals["table1_value"] = dd.value;
  qr.residuals["optimizer_value"] = dd.value;
  qr.residuals["table1_gap"] = std::abs(qr.value - dd.value);
  return qr;
}

// ============================================================
// Korner graph entropy
// ============================================================

QuantityResult korner_graph_entropy(const JointPmf& p, const OptimizerConfig& cfg0) {
  const ConfusabilityGraph g = confusability_graph(p);
  const std::vector<std::vector<int>> sets = independent_sets(g);
  const int nx = g.n;
  const int m = static_cast<int>(sets.size());
  const std::vector<double> px = p.marginal_x();

  std::vector<std::vector<int>> owns(nx);
  for (int w = 0; w < m; ++w)
    for (int v : sets[w]) owns[v].push_back(w);
  for (int x = 0; x < nx; ++x)
    if (px[x] > k_support_eps && owns[x].empty())
      fail(errc::invalid_argument, "vertex outside every maximal independent set");

  // Alternating minimization of I(X;W) over q(w|x) with w restricted to
  // sets containing x: q <- normalized restriction of the marginal r, then
  // r <- mixture of rows. Both half-steps are exact KL projections, so the
  // objective is nonincreasing; the Frank-Wolfe gap certifies optimality.
  std::vector<double> q(static_cast<std::size_t>(nx) * m, 0.0);
  for (int x = 0; x < nx; ++x)
    for (int w : owns[x]) q[static_cast<std::size_t>(x) * m + w] = 1.0 / owns[x].size();
  std::vector<double> r(m, 0.0);
  double value = 0.0, gap = 0.0;
  const long iter_cap =
      std::min<long>(100000, std::max<long>(2000, 200000000 / std::max(1, nx * m)));
  long iter = 0;
  for (; iter < iter_cap; ++iter) {
    std::fill(r.begin(), r.end(), 0.0);
    for (int x = 0; x < nx; ++x)
      if (px[x] > k_support_eps)
        for (int w : owns[x]) r[w] += px[x] * q[static_cast<std::size_t>(x) * m + w];
    value = 0.0;
    double floor_term = 0.0;
    for (int x = 0; x < nx; ++x) {
      if (px[x] <= k_support_eps) continue;
      double best = std::numeric_limits<double>::infinity();
      for (int w : owns[x]) {
        const double qe = q[static_cast<std::size_t>(x) * m + w];
        if (qe <= 0 || r[w] <= 0) continue;
        const double lg = std::log2(qe / r[w]);
        value += px[x] * qe * lg;
        best = std::min(best, lg);
      }
      floor_term += px[x] * best;
    }
    gap = value - floor_term;
    if (gap <= 1e-10) break;
    for (int x = 0; x < nx; ++x) {
      if (px[x] <= k_support_eps) continue;
      double z = 0.0;
      for (int w : owns[x]) z += r[w];
      for (int w : owns[x])
        q[static_cast<std::size_t>(x) * m + w] = z > 0 ? r[w] / z : 1.0 / owns[x].size();
    }
  }

  QuantityResult qr;
  qr.name = "korner_graph_entropy";
  qr.value = std::max(0.0, value);
  qr.method = "independent-set";
  qr.table1_form = "-psi'(1,-1,0; -1,0,0)";
  qr.residuals["fw_gap"] = gap;
  qr.residuals["ba_iterations"] = static_cast<double>(iter);

  const int ny = p.ny();
  std::vector<double> rows(static_cast<std::size_t>(nx) * ny * m);
  for (int x = 0; x < nx; ++x) {
    const double* qa = &q[static_cast<std::size_t>(x) * m];
    double z = std::accumulate(qa, qa + m, 0.0);
    for (int y = 0; y < ny; ++y)
      for (int w = 0; w < m; ++w)
        rows[(static_cast<std::size_t>(x) * ny + y) * m + w] =
            z > 0 ? qa[w] / z : 1.0 / m;
  }
  qr.witness = validate_channel(nx, ny, m, rows, m > nx * ny + 2);

  // Channel-space cross: min I(X;U) with I(Y;U|X) = 0 and H(X|Y,U) = 0.
  OptimizerConfig cfg = tuned(cfg0);
  cfg.extra_seeds.push_back(qr.witness);
  const SolveResult res = solve_constrained(
      p, {{-1, 0, 0}},
      {{Structural::markov_u_x_y, Structural::zero_hx_given_yu}, {}}, cfg);
  qr.residuals["optimizer_value"] = -res.value;
  const SolveResult dd = directional_derivative(p, {1, -1, 0}, {-1, 0, 0}, cfg);
  qr.residuals["table1_value"] = -dd.value;
  qr.residuals["table1_gap"] = std::abs(qr.value - (-dd.value));
  return qr;
}

// ============================================================
// Necessary conditional entropy
// ============================================================

namespace {

// Columns are mergeable into one U-class only when their conditionals
// p(x|y) coincide; proportionality is transitive, so feasible partitions are
// exactly the refinements of the proportionality classes.
std::vector<std::vector<bool>> column_proportional(const JointPmf& p,
                                                   const std::vector<int>& cols,
                                                   const std::vector<double>& py) {
  const int k = static_cast<int>(cols.size());
  std::vector<std::vector<bool>> prop(k, std::vector<bool>(k, false));
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      bool ok = true;
      for (int x = 0; x < p.nx() && ok; ++x) {
        const double a = p.at(x, cols[i]) / py[cols[i]];
        const double b = p.at(x, cols[j]) / py[cols[j]];
        if (std::abs(a - b) > 1e-9) ok = false;
      }
      prop[i][j] = prop[j][i] = ok;
    }
  return prop;
}

double h_u_given_x_of_partition(const JointPmf& p, const std::vector<int>& cols,
                                const std::vector<int>& cls, int nclasses) {
  const int nx = p.nx();
  double h = 0.0;
  std::vector<double> mass(nclasses);
  for (int x = 0; x < nx; ++x) {
    std::fill(mass.begin(), mass.end(), 0.0);
    double pxv = 0.0;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      mass[cls[i]] += p.at(x, cols[i]);
      pxv += p.at(x, cols[i]);
    }
    if (pxv <= 0) continue;
    for (int u = 0; u < nclasses; ++u)
      if (mass[u] > 0) h += mass[u] * std::log2(pxv / mass[u]);
  }
  return h;
}

}  // namespace

QuantityResult necessary_cond_entropy(const JointPmf& p, const OptimizerConfig& cfg0) {
  const int nx = p.nx(), ny = p.ny();
  if (ny > 12) fail(errc::alphabet_too_large, "necessary_cond_entropy needs |Y| <= 12");
  const std::vector<double> py = p.marginal_y();
  std::vector<int> cols;
  for (int y = 0; y < ny; ++y)
    if (py[y] > k_support_eps) cols.push_back(y);
  const int k = static_cast<int>(cols.size());
  const std::vector<std::vector<bool>> prop = column_proportional(p, cols, py);

  // Coarsest feasible partition: proportionality classes. Merging within a
  // class can only lower H(U|X); columns of distinct classes never share one.
  std::vector<int> coarse(k, -1);
  int ncoarse = 0;
  for (int i = 0; i < k; ++i) {
    if (coarse[i] >= 0) continue;
    for (int j = i; j < k; ++j)
      if (prop[i][j]) coarse[j] = ncoarse;
    ++ncoarse;
  }
  double best = h_u_given_x_of_partition(p, cols, coarse, ncoarse);
  std::vector<int> best_cls = coarse;
  int best_n = ncoarse;

  // Exhaustive check over all partitions while the count stays small.
  long checked = 1, feasible = 1;
  if (k >= 1 && k <= 10) {
    checked = feasible = 0;
    std::vector<int> cls(k, 0), maxc(k, 0);
    while (true) {
      ++checked;
      const int n = maxc[k - 1] + 1;
      bool ok = true;
      for (int i = 0; i < k && ok; ++i)
        for (int j = i + 1; j < k && ok; ++j)
          if (cls[i] == cls[j] && !prop[i][j]) ok = false;
      if (ok) {
        ++feasible;
        const double h = h_u_given_x_of_partition(p, cols, cls, n);
        if (h < best - 1e-15) {
          best = h;
          best_cls = cls;
          best_n = n;
        }
      }
      // next restricted growth string
      int i = k - 1;
      while (i > 0 && cls[i] == maxc[i - 1] + 1) --i;
      if (i == 0) break;
      ++cls[i];
      maxc[i] = std::max(maxc[i - 1], cls[i]);
      for (int j = i + 1; j < k; ++j) {
        cls[j] = 0;
        maxc[j] = maxc[i];
      }
    }
  }

  QuantityResult qr;
  qr.name = "necessary_cond_entropy";
  qr.value = std::max(0.0, best);
  qr.method = "construction";
  qr.table1_form = "-psi'(1,2,-2; 1,0,-1)";
  qr.residuals["partitions_checked"] = static_cast<double>(checked);
  qr.residuals["feasible_partitions"] = static_cast<double>(feasible);

  std::vector<int> cell_to_u(static_cast<std::size_t>(nx) * ny, 0);
  std::vector<int> col_class(ny, 0);
  for (int i = 0; i < k; ++i) col_class[cols[i]] = best_cls[i];
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) cell_to_u[static_cast<std::size_t>(x) * ny + y] = col_class[y];
  qr.witness = deterministic_channel(nx, ny, cell_to_u, std::max(1, best_n));

  const SolveResult dd =
      directional_derivative(p, {1, 2, -2}, {1, 0, -1}, tuned(cfg0));
  qr.residuals["table1_value"] = -dd.value;
  qr.residuals["table1_gap"] = std::abs(qr.value - (-dd.value));
  return qr;
}

// ============================================================
// Curves
// ============================================================

namespace {

enum class CurveKind { ib, pf, synthesis };

CurveResult run_curve(const JointPmf& p, const std::vector<double>& grid,
                      const OptimizerConfig& cfg0, CurveKind kind) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < -1e-12) fail(errc::invalid_argument, "curve grid value below zero");
    if (i > 0 && grid[i] < grid[i - 1] - 1e-12)
      fail(errc::invalid_argument, "curve grid not sorted");
  }
  const OptimizerConfig cfg = tuned(cfg0);
  const double tmax = kind == CurveKind::ib   ? p.mutual_information()
                      : kind == CurveKind::pf ? p.hy()
                                              : std::numeric_limits<double>::infinity();
  CurveResult out;
  out.quantity = kind == CurveKind::ib   ? "information-bottleneck"
                 : kind == CurveKind::pf ? "privacy-funnel"
                                         : "channel-synthesis";
  Channel warm;
  bool have_warm = false;
  for (double t : grid) {
    CurvePoint pt;
    pt.t = t;
    pt.witness = constant_channel(p.nx(), p.ny());
    if (t > tmax + 1e-9) {
      pt.feasible = false;
      out.points.push_back(pt);
      continue;
    }
    OptimizerConfig run = cfg;
    if (have_warm) run.extra_seeds.insert(run.extra_seeds.begin(), warm);
    try {
      SolveResult res;
      if (kind == CurveKind::ib) {
        res = solve_constrained(p, {{0, -1, 0}},
                                {{Structural::markov_x_y_u}, {{{1, 0, 0}, +1, t}}}, run);
        pt.raw_value = -res.value;
      } else if (kind == CurveKind::pf) {
        res = solve_constrained(p, {{-1, 0, 0}},
                                {{Structural::markov_x_y_u}, {{{0, 1, 0}, +1, t}}}, run);
        pt.raw_value = -res.value;
      } else {
        GeneralObjective go;
        go.value = [t](const MiPoint& v) { return -std::max(v.vx, v.vxy - t); };
        go.grad = [t](const MiPoint& v) {
          return v.vx >= v.vxy - t ? std::array<double, 3>{-1, 0, 0}
                                   : std::array<double, 3>{0, 0, -1};
        };
        res = solve_general(p, go, {{Structural::markov_x_u_y}, {}}, run);
        pt.raw_value = -res.value;
      }
      pt.witness = res.witness;
      warm = res.witness;
      have_warm = true;
    } catch (const Error& e) {
      if (e.code() != errc::infeasible) throw;
      pt.feasible = false;
    }
    out.points.push_back(pt);
  }

  std::vector<std::size_t> idx;
  std::vector<double> raw;
  for (std::size_t i = 0; i < out.points.size(); ++i)
    if (out.points[i].feasible) {
      idx.push_back(i);
      raw.push_back(out.points[i].raw_value);
    }
  const std::vector<double> fit = kind == CurveKind::synthesis
                                      ? pava_nonincreasing(raw)
                                      : pava_nondecreasing(raw);
  for (std::size_t j = 0; j < idx.size(); ++j) {
    // +0.0 folds negative zero out of the exported values.
    out.points[idx[j]].raw_value += 0.0;
    out.points[idx[j]].value = fit[j] + 0.0;
    out.max_cleanup_delta = std::max(out.max_cleanup_delta, std::abs(fit[j] - raw[j]));
  }
  return out;
}

}  // namespace

CurveResult ib_curve(const JointPmf& p, const std::vector<double>& t_grid,
                     const OptimizerConfig& cfg) {
  return run_curve(p, t_grid, cfg, CurveKind::ib);
}

CurveResult pf_curve(const JointPmf& p, const std::vector<double>& t_grid,
                     const OptimizerConfig& cfg) {
  return run_curve(p, t_grid, cfg, CurveKind::pf);
}

CurveResult synthesis_curve(const JointPmf& p, const std::vector<double>& t_grid,
                            const OptimizerConfig& cfg) {
  return run_curve(p, t_grid, cfg, CurveKind::synthesis);
}

// ============================================================
// Ratio quantities (Dinkelbach)
// ============================================================

namespace {

QuantityResult ratio_quantity(const JointPmf& p, const OptimizerConfig& cfg0,
                              bool maximize) {
  const double ratio_floor = 1e-6;
  if (p.hy() < ratio_floor)
    fail(errc::degenerate_ratio, "Y is (nearly) deterministic; the ratio is undefined");
  const OptimizerConfig cfg = tuned(cfg0);
  const ConstraintSpec cons{{Structural::markov_x_y_u},
                            {{{0, 1, 0}, +1, ratio_floor}}};

  // U = Y is always feasible and seeds the iteration with a valid ratio.
  double lam = p.mutual_information() / p.hy();
  SolveResult res;
  double stage_gap = 0.0;
  int it = 0;
  for (; it < 20; ++it) {
    OptimizerConfig run = cfg;
    if (it > 0) run.extra_seeds.insert(run.extra_seeds.begin(), res.witness);
    const std::array<double, 3> b = maximize
                                        ? std::array<double, 3>{1, -lam, 0}
                                        : std::array<double, 3>{-1, lam, 0};
    res = solve_constrained(p, {b}, cons, run);
    stage_gap = res.value;  // max of (vx - lam*vy) resp. (lam*vy - vx)
    if (stage_gap <= 1e-9) break;
    if (res.v.vy < ratio_floor * 0.5) break;  // ratio undefined at the witness
    const double next = res.v.vx / res.v.vy;
    if (std::abs(next - lam) <= 1e-8) {
      lam = next;
      break;
    }
    lam = next;
  }

  QuantityResult qr;
  qr.name = maximize ? "s_star" : "v_star";
  qr.value = lam;
  qr.witness = res.witness;
  qr.method = "optimizer";
  merge_residuals(qr, res);
  qr.residuals["iterations"] = static_cast<double>(it + 1);
  qr.residuals["final_stage_gap"] = stage_gap;
  qr.residuals["ratio_floor"] = ratio_floor;
  return qr;
}

}  // namespace

QuantityResult s_star(const JointPmf& p, const OptimizerConfig& cfg) {
  return ratio_quantity(p, cfg, true);
}

QuantityResult v_star(const JointPmf& p, const OptimizerConfig& cfg) {
  return ratio_quantity(p, cfg, false);
}

// ============================================================
// Perfect-privacy rate
// ============================================================

QuantityResult g_rstar(const JointPmf& p, const OptimizerConfig& cfg0) {
  const OptimizerConfig cfg = tuned(cfg0);
  const SolveResult res = solve_constrained(
      p, {{0, 1, 0}}, {{Structural::markov_x_y_u, Structural::u_indep_x}, {}}, cfg);
  QuantityResult qr;
  qr.name = "g_rstar";
  qr.value = res.value;
  qr.witness = res.witness;
  qr.method = "optimizer";
  qr.table1_form = "psi'(-1,1,-1; 0,1,0)";
  merge_residuals(qr, res);
  const SolveResult dd = directional_derivative(p, {-1, 1, -1}, {0, 1, 0}, cfg);
  qr.residuals["table1_value"] = dd.value;
  qr.residuals["table1_gap"] = std::abs(qr.value - dd.value);
  return qr;
}

// ============================================================
// Excess functional information
// ============================================================

QuantityResult excess_functional_info(const JointPmf& p, const OptimizerConfig& cfg0) {
  OptimizerConfig cfg = tuned(cfg0);
  const Channel frl = frl_channel(p, FrlDirection::x_to_y);
  cfg.extra_seeds.push_back(frl);
  const SolveResult res =
      solve_constrained(p, {{0, 1, 0}}, {{Structural::u_indep_x}, {}}, cfg);
  QuantityResult qr;
  qr.name = "excess_functional_info";
  qr.value = p.hy_given_x() - res.value;
  qr.witness = res.witness;
  qr.method = "optimizer";
  qr.table1_form = "-psi'(-2,0,1; 0,1,-1)";
  merge_residuals(qr, res);
  qr.residuals["max_vy"] = res.value;
  qr.residuals["seed_vy"] = mi_point_of(p, frl).vy;
  const SolveResult dd = directional_derivative(p, {-2, 0, 1}, {0, 1, -1}, cfg);
  qr.residuals["table1_value"] = -dd.value;
  qr.residuals["table1_gap"] = std::abs(qr.value - (-dd.value));
  return qr;
}

// ============================================================
// Interaction information quantities
// ============================================================

namespace {

enum class InteractionKind { ppi, pni, nni };

QuantityResult interaction_quantity(const JointPmf& p, const OptimizerConfig& cfg0,
                                    InteractionKind kind) {
  const double upper = std::min(p.hx_given_y(), p.hy_given_x());
  const MaxConditionResult mc = max_condition_check(p);
  const std::optional<PathWitness> path = has_path_length_3(p);
  const std::optional<CycleWitness> cyc = find_cycle(p);

  OptimizerConfig cfg = tuned(cfg0);
  if (cyc) cfg.extra_seeds.push_back(cycle_witness_channel(p, *cyc, {}));
  if (path && kind != InteractionKind::ppi)
    cfg.extra_seeds.push_back(path_witness_channel(p, *path, {}));
  if (mc.holds) cfg.extra_seeds.push_back(bvn_channel(p));

  SolveResult res;
  if (kind == InteractionKind::nni) {
    res = support_function(p, {-1, -1, 1}, cfg);
  } else {
    ConstraintSpec cons;
    cons.structural.push_back(Structural::u_indep_x);
    if (kind == InteractionKind::ppi) cons.structural.push_back(Structural::u_indep_y);
    res = solve_constrained(p, {{-1, -1, 1}}, cons, cfg);
  }

  QuantityResult qr;
  qr.name = kind == InteractionKind::ppi   ? "g_ppi"
            : kind == InteractionKind::pni ? "g_pni"
                                           : "g_nni";
  qr.table1_form = kind == InteractionKind::ppi   ? "psi'(-1,-1,0; 0,0,1)"
                   : kind == InteractionKind::pni ? "psi'(-1,0,0; 0,-1,1)"
                                                  : "psi(-1,-1,1)";
  merge_residuals(qr, res);
  qr.residuals["upper_bound"] = upper;
  qr.residuals["optimizer_value"] = res.value;

  const bool zero_screen = kind == InteractionKind::ppi ? !cyc : !path;
  if (mc.holds) {
    qr.value = upper;
    qr.witness = bvn_channel(p);
    qr.method = "exact-graph";
  } else if (zero_screen) {
    qr.value = 0.0;
    qr.witness = constant_channel(p.nx(), p.ny());
    qr.method = "exact-graph";
  } else {
    qr.value = res.value;
    qr.witness = res.witness;
    qr.method = "optimizer";
  }

  if (kind == InteractionKind::nni) {
    qr.residuals["table1_value"] = res.value;
    qr.residuals["table1_gap"] = std::abs(qr.value - res.value);
  } else {
    const std::array<double, 3> b = kind == InteractionKind::ppi
                                        ? std::array<double, 3>{-1, -1, 0}
                                        : std::array<double, 3>{-1, 0, 0};
    const std::array<double, 3> c = kind == InteractionKind::ppi
                                        ? std::array<double, 3>{0, 0, 1}
                                        : std::array<double, 3>{0, -1, 1};
    const SolveResult dd = directional_derivative(p, b, c, cfg);
    qr.residuals["table1_value"] = dd.value;
    qr.residuals["table1_gap"] = std::abs(qr.value - dd.value);
  }
  if (kind == InteractionKind::pni) {
    const MiPoint w = mi_point_of(p, qr.witness);
    qr.residuals["hy_given_xu"] = p.hy_given_x() - (w.vxy - w.vx);
    qr.residuals["witness_objective"] = interaction_value(w);
  }
  return qr;
}

}  // namespace

QuantityResult g_nni(const JointPmf& p, const OptimizerConfig& cfg) {
  return interaction_quantity(p, cfg, InteractionKind::nni);
}

QuantityResult g_pni(const JointPmf& p, const OptimizerConfig& cfg) {
  return interaction_quantity(p, cfg, InteractionKind::pni);
}

QuantityResult g_ppi(const JointPmf& p, const OptimizerConfig& cfg) {
  return interaction_quantity(p, cfg, InteractionKind::ppi);
}

BoundsReport bounds_report(const JointPmf& p, const OptimizerConfig& cfg0) {
  BoundsReport br;
  br.ppi = g_ppi(p, cfg0);
  OptimizerConfig c1 = cfg0;
  c1.extra_seeds.push_back(br.ppi.witness);
  br.pni = g_pni(p, c1);
  OptimizerConfig c2 = cfg0;
  c2.extra_seeds.push_back(br.ppi.witness);
  c2.extra_seeds.push_back(br.pni.witness);
  br.nni = g_nni(p, c2);
  br.upper = std::min(p.hx_given_y(), p.hy_given_x());
  br.worst_violation =
      std::max({0.0, -br.ppi.value, br.ppi.value - br.pni.value,
                br.pni.value - br.nni.value, br.nni.value - br.upper});
  br.chain_ok = br.worst_violation <= 1e-6;
  return br;
}

// ============================================================
// Path and cycle witnesses
// ============================================================

namespace {

Channel balanced_binary_channel(const JointPmf& p,
                                const std::vector<std::pair<int, double>>& shifts) {
  // shifts: (cell, delta on q(1|cell)); all other cells stay at 1/2.
  const int nx = p.nx(), ny = p.ny();
  std::vector<double> rows(static_cast<std::size_t>(nx) * ny * 2, 0.5);
  for (const auto& [cell, delta] : shifts) {
    rows[static_cast<std::size_t>(cell) * 2] = 0.5 - delta;
    rows[static_cast<std::size_t>(cell) * 2 + 1] = 0.5 + delta;
  }
  return validate_channel(nx, ny, 2, rows);
}

}  // namespace

Channel path_witness_channel(const JointPmf& p, const PathWitness& path,
                             const WitnessConfig& wc) {
  const int nx = p.nx(), ny = p.ny();
  const int x1 = path.x1, y1 = path.y1, x2 = path.x2, y2 = path.y2;
  if (x1 < 0 || x1 >= nx || x2 < 0 || x2 >= nx || y1 < 0 || y1 >= ny || y2 < 0 ||
      y2 >= ny || x1 == x2 || y1 == y2)
    fail(errc::invalid_path, "path indices out of range or not distinct");
  const double p11 = p.at(x1, y1), p12 = p.at(x1, y2), p21 = p.at(x2, y1);
  if (p11 <= k_support_eps || p12 <= k_support_eps || p21 <= k_support_eps)
    fail(errc::invalid_path, "path cells must carry positive mass");
  const double bound = std::min(p11, p12) / 4.0;
  const double eps = wc.epsilon > 0 ? wc.epsilon : bound;
  if (eps > bound + 1e-15)
    fail(errc::epsilon_too_large,
         "epsilon exceeds a quarter of the smallest perturbed cell");

  const Channel c = balanced_binary_channel(
      p, {{x1 * ny + y1, eps / p11}, {x1 * ny + y2, -eps / p12}});
  const MiPoint v = mi_point_of(p, c);
  if (v.vx > 1e-12 || v.vxy - v.vy <= 0)
    fail(errc::invalid_path, "perturbation failed its independence checks");
  return c;
}

Channel cycle_witness_channel(const JointPmf& p, const CycleWitness& cycle,
                              const WitnessConfig& wc) {
  const int nx = p.nx(), ny = p.ny();
  const int a = static_cast<int>(cycle.xs.size());
  if (a < 2 || cycle.ys.size() != cycle.xs.size())
    fail(errc::invalid_cycle, "cycle needs at least two x and two y symbols");
  std::vector<int> sx = cycle.xs, sy = cycle.ys;
  std::sort(sx.begin(), sx.end());
  std::sort(sy.begin(), sy.end());
  if (std::adjacent_find(sx.begin(), sx.end()) != sx.end() ||
      std::adjacent_find(sy.begin(), sy.end()) != sy.end())
    fail(errc::invalid_cycle, "cycle revisits a symbol");
  for (int i = 0; i < a; ++i)
    if (cycle.xs[i] < 0 || cycle.xs[i] >= nx || cycle.ys[i] < 0 || cycle.ys[i] >= ny)
      fail(errc::invalid_cycle, "cycle indices out of range");

  double min_cell = std::numeric_limits<double>::infinity();
  for (int i = 0; i < a; ++i) {
    const double up = p.at(cycle.xs[i], cycle.ys[i]);
    const double dn = p.at(cycle.xs[i], cycle.ys[(i + 1) % a]);
    if (up <= k_support_eps || dn <= k_support_eps)
      fail(errc::invalid_cycle, "cycle cells must carry positive mass");
    min_cell = std::min({min_cell, up, dn});
  }
  const double bound = min_cell / 4.0;
  const double eps = wc.epsilon > 0 ? wc.epsilon : bound;
  if (eps > bound + 1e-15)
    fail(errc::epsilon_too_large, "epsilon exceeds a quarter of the smallest cycle cell");

  std::vector<std::pair<int, double>> shifts;
  for (int i = 0; i < a; ++i) {
    shifts.emplace_back(cycle.xs[i] * ny + cycle.ys[i],
                        eps / p.at(cycle.xs[i], cycle.ys[i]));
    shifts.emplace_back(cycle.xs[i] * ny + cycle.ys[(i + 1) % a],
                        -eps / p.at(cycle.xs[i], cycle.ys[(i + 1) % a]));
  }
  const Channel c = balanced_binary_channel(p, shifts);
  const MiPoint v = mi_point_of(p, c);
  if (v.vx > 1e-12 || v.vy > 1e-12 || v.vxy <= 0)
    fail(errc::invalid_cycle, "perturbation failed its independence checks");
  return c;
}

// ============================================================
// Birkhoff-von Neumann witness
// ============================================================

namespace {

// Hopcroft-Karp maximum matching; left/right sides have equal size n.
struct HopcroftKarp {
  int n;
  const std::vector<std::vector<int>>& adj;
  std::vector<int> match_l, match_r, dist;

  explicit HopcroftKarp(int n_, const std::vector<std::vector<int>>& adj_)
      : n(n_), adj(adj_), match_l(n_, -1), match_r(n_, -1), dist(n_) {}

  bool bfs() {
    std::vector<int> queue;
    for (int u = 0; u < n; ++u) {
      dist[u] = match_l[u] < 0 ? 0 : -1;
      if (dist[u] == 0) queue.push_back(u);
    }
    bool reachable = false;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const int u = queue[h];
      for (int v : adj[u]) {
        const int w = match_r[v];
        if (w < 0) reachable = true;
        else if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          queue.push_back(w);
        }
      }
    }
    return reachable;
  }

  bool dfs(int u) {
    for (int v : adj[u]) {
      const int w = match_r[v];
      if (w < 0 || (dist[w] == dist[u] + 1 && dfs(w))) {
        match_l[u] = v;
        match_r[v] = u;
        return true;
      }
    }
    dist[u] = -1;
    return false;
  }

  int run() {
    int size = 0;
    while (bfs())
      for (int u = 0; u < n; ++u)
        if (match_l[u] < 0 && dfs(u)) ++size;
    return size;
  }
};

struct ComponentDecomposition {
  std::vector<int> xs, ys;             // global symbol ids, local index order
  std::vector<double> weights;         // permutation coefficients, sum 1
  std::vector<std::vector<int>> perms; // local x -> local y
};

ComponentDecomposition decompose_component(const JointPmf& p, const std::vector<int>& xs,
                                           const std::vector<int>& ys, double row_mass) {
  const int n = static_cast<int>(xs.size());
  ComponentDecomposition out;
  out.xs = xs;
  out.ys = ys;
  std::vector<double> d(static_cast<std::size_t>(n) * n);
  int support = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      d[static_cast<std::size_t>(i) * n + j] = p.at(xs[i], ys[j]) / row_mass;
      if (d[static_cast<std::size_t>(i) * n + j] > 1e-12) ++support;
    }
  int rounds = support + 2;
  double remaining = 1.0;
  while (remaining > 1e-12 && rounds-- > 0) {
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (d[static_cast<std::size_t>(i) * n + j] > 1e-12) adj[i].push_back(j);
    HopcroftKarp hk(n, adj);
    if (hk.run() < n)
      fail(errc::condition_not_met, "support lost its perfect matching during decomposition");
    double w = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      w = std::min(w, d[static_cast<std::size_t>(i) * n + hk.match_l[i]]);
    out.weights.push_back(w);
    out.perms.push_back(hk.match_l);
    for (int i = 0; i < n; ++i) {
      double& cell = d[static_cast<std::size_t>(i) * n + hk.match_l[i]];
      cell = std::max(0.0, cell - w);
    }
    remaining = *std::max_element(d.begin(), d.end()) * n;
  }
  double residual = *std::max_element(d.begin(), d.end());
  if (residual > 1e-9)
    fail(errc::condition_not_met, "permutation decomposition left residual mass");
  double s = std::accumulate(out.weights.begin(), out.weights.end(), 0.0);
  if (std::abs(s - 1.0) > 1e-9)
    fail(errc::condition_not_met, "permutation weights failed to sum to one");
  for (double& w : out.weights) w /= s;
  return out;
}

}  // namespace

Channel bvn_channel(const JointPmf& p) {
  const MaxConditionResult mc = max_condition_check(p);
  if (!mc.holds)
    fail(errc::condition_not_met,
         "matched marginals on the support are required (entropy gap " +
             std::to_string(mc.entropy_gap) + ", worst pair gap " +
             std::to_string(mc.worst_pair_gap) + ")");
  const ComponentLabeling comp = support_components(p);
  const std::vector<double> px = p.marginal_x();
  const int nx = p.nx(), ny = p.ny();

  std::vector<ComponentDecomposition> parts;
  for (int c = 0; c < comp.count; ++c) {
    std::vector<int> xs, ys;
    for (int x = 0; x < nx; ++x)
      if (comp.x_comp[x] == c) xs.push_back(x);
    for (int y = 0; y < ny; ++y)
      if (comp.y_comp[y] == c) ys.push_back(y);
    if (xs.empty() || xs.size() != ys.size())
      fail(errc::condition_not_met, "support component is not square");
    parts.push_back(decompose_component(p, xs, ys, px[xs[0]]));
  }

  double u_count = 1.0;
  for (const auto& part : parts) u_count *= static_cast<double>(part.weights.size());
  if (u_count > 4096.0)
    fail(errc::alphabet_too_large, "permutation tuple alphabet exceeds 4096");
  const int nu = static_cast<int>(u_count);

  // U is the tuple of per-component permutation indices (mixed radix); the
  // component owning (x,y) contributes its posterior, the others their prior.
  std::vector<int> comp_of_x(nx, -1), local_x(nx, -1), local_y(ny, -1);
  for (std::size_t c = 0; c < parts.size(); ++c) {
    for (std::size_t i = 0; i < parts[c].xs.size(); ++i) {
      comp_of_x[parts[c].xs[i]] = static_cast<int>(c);
      local_x[parts[c].xs[i]] = static_cast<int>(i);
    }
    for (std::size_t j = 0; j < parts[c].ys.size(); ++j)
      local_y[parts[c].ys[j]] = static_cast<int>(j);
  }
  std::vector<double> rows(static_cast<std::size_t>(nx) * ny * nu, 0.0);
  std::vector<int> digits(parts.size());
  for (int u = 0; u < nu; ++u) {
    int rem = u;
    for (std::size_t c = 0; c < parts.size(); ++c) {
      digits[c] = rem % static_cast<int>(parts[c].weights.size());
      rem /= static_cast<int>(parts[c].weights.size());
    }
    double prior = 1.0;
    for (std::size_t c = 0; c < parts.size(); ++c) prior *= parts[c].weights[digits[c]];
    for (int x = 0; x < nx; ++x)
      for (int y = 0; y < ny; ++y) {
        const std::size_t cell = static_cast<std::size_t>(x) * ny + y;
        if (p.at(x, y) > k_support_eps) {
          const int c = comp_of_x[x];
          const auto& part = parts[c];
          if (part.perms[digits[c]][local_x[x]] != local_y[y]) continue;
          // Posterior of the owning digit is weight/d(x,y); the weight in
          // the prior cancels against it, leaving prior/d(x,y).
          const double dxy = p.at(x, y) / px[part.xs[0]];
          rows[cell * nu + u] = prior / dxy;
        } else {
          rows[cell * nu + u] = prior;
        }
      }
  }
  Channel c = validate_channel(nx, ny, nu, rows, nu > nx * ny + 2);

  const MiPoint v = mi_point_of(p, c);
  const double hygx = p.hy_given_x(), hxgy = p.hx_given_y();
  if (v.vx > 1e-9 || v.vy > 1e-9 || std::abs(hygx - (v.vxy - v.vx)) > 1e-9 ||
      std::abs(hxgy - (v.vxy - v.vy)) > 1e-9 ||
      std::abs(interaction_value(v) - hygx) > 1e-9)
    fail(errc::condition_not_met, "decomposition witness failed its residual checks");
  return c;
}

// ============================================================
// Independent-pair constructions
// ============================================================

namespace {

void require_independent(const JointPmf& p) {
  const std::vector<double> px = p.marginal_x(), py = p.marginal_y();
  for (int x = 0; x < p.nx(); ++x)
    for (int y = 0; y < p.ny(); ++y)
      if (std::abs(p.at(x, y) - px[x] * py[y]) > 1e-9)
        fail(errc::not_independent, "X and Y must be independent for this construction");
}

// Antiderivative of l(t) = -t log2 t: L(t) = t^2 (1/(4 ln 2) - log2(t)/2).
double l_antiderivative(double t) {
  if (t <= 0) return 0.0;
  return t * t * (1.0 / (4.0 * std::log(2.0)) - 0.5 * std::log2(t));
}

// Overlap length of the arcs [0,a) and [d, d+b) on the unit circle.
double arc_overlap(double a, double b, double d) {
  d -= std::floor(d);
  const double piece1 = std::max(0.0, std::min(a, d + b) - d);
  const double piece2 = d + b > 1.0 ? std::max(0.0, std::min(a, d + b - 1.0)) : 0.0;
  return piece1 + piece2;
}

}  // namespace

double f_integral(double a, double b) {
  if (a < -1e-12 || a > 1.0 + 1e-12 || b < -1e-12 || b > 1.0 + 1e-12)
    fail(errc::invalid_argument, "arc lengths must lie in [0,1]");
  a = std::clamp(a, 0.0, 1.0);
  b = std::clamp(b, 0.0, 1.0);
  if (b > a) std::swap(a, b);
  if (b <= 0.0) return 0.0;
  const double plateau = (a - b) * nlog2n(b);
  if (a + b <= 1.0) return plateau + 2.0 * l_antiderivative(b);
  const double c = a + b - 1.0;
  return plateau + c * nlog2n(c) + 2.0 * (l_antiderivative(b) - l_antiderivative(c));
}

double indep_lower_bound(const JointPmf& p) {
  require_independent(p);
  const std::vector<double> px = p.marginal_x(), py = p.marginal_y();
  double s = 0.0;
  for (double ax : px)
    for (double ay : py) {
      if (ax <= 0 || ay <= 0) continue;
      s += ax * ay * (-std::log2(std::max(ax, ay)));
    }
  return s - 1.0;
}

double achieved_indep_value(const JointPmf& p) {
  require_independent(p);
  const std::vector<double> px = p.marginal_x(), py = p.marginal_y();
  double s = 0.0;
  for (double ax : px)
    for (double ay : py) s += f_integral(ax, ay);
  return p.hxy() - s;
}

Channel indep_witness_channel(const JointPmf& p, int m) {
  require_independent(p);
  if (m < 2) fail(errc::invalid_argument, "quantization needs at least two levels");
  const int nx = p.nx(), ny = p.ny();
  const std::vector<double> px = p.marginal_x(), py = p.marginal_y();
  std::vector<double> ax(nx, 0.0), by(ny, 0.0);
  for (int x = 1; x < nx; ++x) ax[x] = ax[x - 1] + px[x - 1];
  for (int y = 1; y < ny; ++y) by[y] = by[y - 1] + py[y - 1];

  std::vector<double> rows(static_cast<std::size_t>(nx) * ny * m, 0.0);
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y) {
      double* row = &rows[(static_cast<std::size_t>(x) * ny + y) * m];
      if (px[x] <= 0 || py[y] <= 0) {
        std::fill(row, row + m, 1.0 / m);
        continue;
      }
      // The conditional density of the shift given (x,y) is the overlap
      // profile, piecewise linear with breakpoints where an arc edge crosses
      // the other's; trapezoids between breakpoints integrate it exactly.
      std::vector<double> bps;
      const double base = ax[x] - by[y];
      for (double delta : {-py[y], 0.0, px[x] - py[y], px[x]}) {
        double s = base + delta;
        s -= std::floor(s);
        bps.push_back(s);
      }
      std::sort(bps.begin(), bps.end());
      double total = 0.0;
      for (int k = 0; k < m; ++k) {
        const double s0 = static_cast<double>(k) / m;
        const double s1 = static_cast<double>(k + 1) / m;
        std::vector<double> pts{s0};
        for (double s : bps)
          if (s > s0 + 1e-15 && s < s1 - 1e-15) pts.push_back(s);
        pts.push_back(s1);
        double integral = 0.0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
          const double g0 = arc_overlap(px[x], py[y], pts[i] - base);
          const double g1 = arc_overlap(px[x], py[y], pts[i + 1] - base);
          integral += 0.5 * (g0 + g1) * (pts[i + 1] - pts[i]);
        }
        row[k] = integral / (px[x] * py[y]);
        total += row[k];
      }
      for (int k = 0; k < m; ++k) row[k] /= total;
    }
  return validate_channel(nx, ny, m, rows, m > nx * ny + 2);
}

}  // namespace egw
