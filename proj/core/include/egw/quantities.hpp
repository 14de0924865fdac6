#pragma once

#include <map>
#include <string>
#include <vector>

#include "egw/graph.hpp"
#include "egw/optimize.hpp"
#include "egw/prob.hpp"

namespace egw {

// ============================================================
// Result types
// ============================================================

// A scalar information quantity together with the channel that attains it.
// The residual map carries every consistency number computed along the way:
// structural residuals re-evaluated at the witness, the support-function
// cross value ("table1_value"), the raw optimizer value when an exact
// short-circuit decided the result ("optimizer_value"), and so on. Keys are
// stable and serialized verbatim.
struct QuantityResult {
  std::string name;
  double value = 0.0;  // bits (dimensionless for the ratio quantities)
  Channel witness;
  std::string method;  // exact-graph | independent-set | optimizer | oracle | construction
  std::map<std::string, double> residuals;
  std::string table1_form;  // support-function form used, empty when none applies
};

struct CurvePoint {
  double t = 0.0;
  double value = 0.0;      // after isotonic cleanup
  double raw_value = 0.0;  // solver output before cleanup
  bool feasible = true;    // false: t beyond the feasible range for this curve
  Channel witness;
};

struct CurveResult {
  std::string quantity;  // information-bottleneck | privacy-funnel | channel-synthesis
  std::vector<CurvePoint> points;
  double max_cleanup_delta = 0.0;  // largest |value - raw_value| over feasible rows
};

// Parameters of the explicit witness constructions.
struct WitnessConfig {
  double epsilon = 0.0;  // <= 0: one quarter of the smallest relevant cell mass
  int m = 2;             // quantization levels for the independence witness
};

// The three interaction quantities and their shared upper bound
// min{H(X|Y), H(Y|X)}, with the chain 0 <= ppi <= pni <= nni <= upper
// checked within 1e-6. Chain violations beyond tolerance are reported via
// worst_violation, never clipped away.
struct BoundsReport {
  QuantityResult ppi;
  QuantityResult pni;
  QuantityResult nni;
  double upper = 0.0;
  bool chain_ok = false;
  double worst_violation = 0.0;  // largest chain violation, 0 when the chain holds
};

// ============================================================
// Scalar quantities
// ============================================================

// min I(X,Y;U) over channels with X and Y conditionally independent given U.
QuantityResult wyner_ci(const JointPmf& p, const OptimizerConfig& cfg = {});

// Entropy of the finest common function of X and Y (exact, from the support
// components), cross-checked against the optimizer.
QuantityResult gacs_korner_ci(const JointPmf& p, const OptimizerConfig& cfg = {});

// Graph entropy of the confusability graph over X: exact convex minimization
// of I(X;W) over distributions on maximal independent sets containing X.
QuantityResult korner_graph_entropy(const JointPmf& p, const OptimizerConfig& cfg = {});

// min H(U|X) over deterministic functions U = f(Y) with X and Y conditionally
// independent given U; exact search over feasible Y-partitions.
QuantityResult necessary_cond_entropy(const JointPmf& p, const OptimizerConfig& cfg = {});

// sup / inf of I(X;U)/I(Y;U) over channels with U conditionally independent
// of X given Y, excluding I(Y;U) < 1e-6 from the ratio.
QuantityResult s_star(const JointPmf& p, const OptimizerConfig& cfg = {});
QuantityResult v_star(const JointPmf& p, const OptimizerConfig& cfg = {});

// max I(Y;U) over channels with I(X;U) = 0 and I(X;U|Y) = 0.
QuantityResult g_rstar(const JointPmf& p, const OptimizerConfig& cfg = {});

// H(Y|X) minus the largest I(Y;U) achievable with U independent of X.
QuantityResult excess_functional_info(const JointPmf& p, const OptimizerConfig& cfg = {});

// Interaction information maxima: unconstrained (nni), U independent of X
// (pni), U independent of both X and Y (ppi). Structural short-circuits give
// exact values when the support graph forces them.
QuantityResult g_nni(const JointPmf& p, const OptimizerConfig& cfg = {});
QuantityResult g_pni(const JointPmf& p, const OptimizerConfig& cfg = {});
QuantityResult g_ppi(const JointPmf& p, const OptimizerConfig& cfg = {});

BoundsReport bounds_report(const JointPmf& p, const OptimizerConfig& cfg = {});

// ============================================================
// Curves
// ============================================================

// Per grid value t: information bottleneck minimizes I(Y;U) over channels on
// y alone subject to I(X;U) >= t; privacy funnel minimizes I(X;U) subject to
// I(Y;U) >= t; synthesis minimizes max{I(X;U), I(X,Y;U) - t} over channels
// with X and Y conditionally independent given U. Rows with t beyond the
// feasible range are marked infeasible rather than failing the sweep.
CurveResult ib_curve(const JointPmf& p, const std::vector<double>& t_grid,
                     const OptimizerConfig& cfg = {});
CurveResult pf_curve(const JointPmf& p, const std::vector<double>& t_grid,
                     const OptimizerConfig& cfg = {});
CurveResult synthesis_curve(const JointPmf& p, const std::vector<double>& t_grid,
                            const OptimizerConfig& cfg = {});

// ============================================================
// Explicit witness channels
// ============================================================

// Binary-U perturbation along a length-3 support path: U is independent of X
// exactly while I(X;U|Y) > 0.
Channel path_witness_channel(const JointPmf& p, const PathWitness& path,
                             const WitnessConfig& wc = {});

// Binary-U perturbation along an alternating support cycle: U is independent
// of X and of Y exactly while I(X,Y;U) > 0.
Channel cycle_witness_channel(const JointPmf& p, const CycleWitness& cycle,
                              const WitnessConfig& wc = {});

// Permutation decomposition of the (doubly stochastic after scaling) support
// components; U is the tuple of permutation indices. Requires the maximum
// condition; achieves I(X;Y|U) - I(X;Y) = H(Y|X) with U independent of each
// of X and Y and H(X|Y,U) = H(Y|X,U) = 0.
Channel bvn_channel(const JointPmf& p);

// ============================================================
// Independent-pair constructions
// ============================================================

// E[-log2 max{p(X), p(Y)}] - 1 for independent X, Y.
double indep_lower_bound(const JointPmf& p);

// Integral over a uniform circular shift u of l(|[0,b] n ([u,u+a] mod 1)|),
// where l(t) = -t log2 t; closed-form piecewise evaluation, symmetric in
// (a, b).
double f_integral(double a, double b);

// H(X,Y) - sum_{x,y} f_integral(p(x), p(y)): the interaction information
// achieved by the continuous circular-shift construction.
double achieved_indep_value(const JointPmf& p);

// m-level quantization of the circular-shift witness; bin masses are exactly
// 1/m, so U remains exactly independent of X and of Y.
Channel indep_witness_channel(const JointPmf& p, int m);

}  // namespace egw
