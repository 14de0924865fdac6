#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "egw/prob.hpp"

namespace egw {

// Structural constraints on the auxiliary channel. Markov chains through y
// (x) are enforced exactly by parameterizing the channel on y (x) alone;
// everything else is enforced by one-sided exact penalties on the
// corresponding nonnegative information residual, followed by a projection
// polish where a closed form exists.
enum class Structural {
  u_indep_x,         // I(X;U) = 0
  u_indep_y,         // I(Y;U) = 0
  markov_x_y_u,      // I(X;U|Y) = 0
  markov_u_x_y,      // I(Y;U|X) = 0
  markov_x_u_y,      // I(X;Y|U) = 0
  zero_hx_given_yu,  // H(X|Y,U) = 0
  zero_hy_given_xu,  // H(Y|X,U) = 0
  zero_hu_given_x,   // H(U|X) = 0
  zero_hu_given_y,   // H(U|Y) = 0
};

const char* structural_name(Structural s);

// Linear constraint a.v (rel) r on the mutual-information coordinates.
struct LinearConstraint {
  std::array<double, 3> a;
  int rel;  // -1: <=, 0: ==, +1: >=
  double r;
};

struct ConstraintSpec {
  std::vector<Structural> structural;
  std::vector<LinearConstraint> linear;
};

// Direction of a support-function query; the solver maximizes b.v.
struct ObjectiveSpec {
  std::array<double, 3> b;
};

struct OptimizerConfig {
  int u_size = 0;        // 0: use the cardinality bound |X||Y|+2
  int restarts = 64;
  int max_iterations = 500;  // sweeps per penalty stage
  double objective_tol = 1e-9;
  double constraint_tol = 1e-9;  // feasibility threshold for Infeasible
  std::vector<double> penalty_schedule = {1.0, 10.0, 100.0, 1000.0};
  std::uint64_t seed = 1;
  int threads = 1;           // restart-level parallelism; merge is ordered
  double argmax_tol = 1e-6;  // band for directional-derivative candidates
  bool allow_large_u = false;
  std::vector<Channel> extra_seeds;  // warm starts, tried before random ones
};

// Values reported by the solver are lower bounds attained by the returned
// witness: value == objective(mi_point(witness)) within 1e-10 by
// construction, and every structural residual is re-evaluated at the witness.
struct SolveResult {
  double value = 0.0;
  MiPoint v;
  Channel witness;
  std::map<std::string, double> residuals;
  double feasibility = 0.0;  // max residual over all constraints
  bool converged = false;    // best value reproduced by another restart
  int restarts_at_best = 0;
  int iterations = 0;
  double oracle_slack = 0.0;  // grid oracle only: Lipschitz slack bound
};

// psi(b) = max b.v over the region. Internally normalizes b so that the
// result is exactly positively homogeneous: psi(t*b) = t*psi(b) for t > 0.
SolveResult support_function(const JointPmf& p, const std::array<double, 3>& b,
                             const OptimizerConfig& cfg);

// One-sided directional derivative psi'(b; c) = max { c.v : v argmax of b.v }.
// Two stages: estimate psi(b), then maximize W*(b.v) + c.v over the penalty
// schedule and keep candidates with b.v within argmax_tol of psi(b).
SolveResult directional_derivative(const JointPmf& p, const std::array<double, 3>& b,
                                   const std::array<double, 3>& c,
                                   const OptimizerConfig& cfg);

// Maximize b.v subject to the constraint spec. Throws Infeasible when no
// witness reaches feasibility <= cfg.constraint_tol.
SolveResult solve_constrained(const JointPmf& p, const ObjectiveSpec& obj,
                              const ConstraintSpec& cons, const OptimizerConfig& cfg);

// Nonlinear scalarizations (minimax objectives) share the same engine. The
// gradient is a subgradient of the objective as a function of v.
struct GeneralObjective {
  std::function<double(const MiPoint&)> value;
  std::function<std::array<double, 3>(const MiPoint&)> grad;
};

SolveResult solve_general(const JointPmf& p, const GeneralObjective& obj,
                          const ConstraintSpec& cons, const OptimizerConfig& cfg);

// All deterministic channels (x,y) -> u up to relabeling of u, i.e. set
// partitions of the cell set into at most u_size blocks, with their
// mi_points, in restricted-growth-string order. EnumerationTooLarge when
// u_size^(|X||Y|) exceeds enum_cap.
std::vector<std::pair<Channel, MiPoint>> enumerate_deterministic(
    const JointPmf& p, int u_size, double enum_cap = 1e7);

// Independent exhaustive oracle for small-cardinality U on pmfs with at most
// 4 cells: scans q(u=0|x,y) over a uniform grid with the given step and keeps
// grid points whose constraint residuals fit the admission band, 0.15x the
// step by default (a step-h grid straddles a constraint manifold at distance
// Theta(h)) or the given fixed feas_tol. Returns the best admitted objective
// together with a numeric Lipschitz slack bound (step times the sum of
// absolute objective gradients at the winner).
// OracleTooLarge when |X||Y| > 4, u_size > 2, or step < 0.005.
SolveResult grid_oracle(const JointPmf& p, const ObjectiveSpec& obj,
                        const ConstraintSpec& cons, int u_size, double step,
                        double feas_tol = -1.0);

// Deterministic seed split for restart r of a run.
std::uint64_t restart_seed(std::uint64_t seed, int restart);

}  // namespace egw
