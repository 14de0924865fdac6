#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "egw/hull.hpp"
#include "egw/optimize.hpp"
#include "egw/prob.hpp"

namespace egw {

// ============================================================================
// Point maps and exact bounds
// ============================================================================

// The canonical triple (I(X;U), I(Y;U), I(X,Y;U)) of a channel.
MiPoint mi_point(const JointPmf& p, const Channel& c);

// Five shared-plus-private rates associated with a region point:
//   (v_XY, H(X)-v_X, H(Y)-v_Y, H(X|Y)-v_XY+v_Y, H(Y|X)-v_XY+v_X).
struct RateTuple {
  std::array<double, 5> r{};
  double operator[](int i) const { return r[static_cast<size_t>(i)]; }
  double& operator[](int i) { return r[static_cast<size_t>(i)]; }
};

// Throws OuterBoundViolated when v breaks the outer bound by more than 1e-9;
// coordinates in [-1e-9, 0) are clamped to 0.
RateTuple rate_tuple_of(const JointPmf& p, const MiPoint& v);

// One named linear inequality with its slack (>= 0 means satisfied).
struct BoundTerm {
  std::string name;
  double slack = 0.0;
};

// The outer polytope: v_X >= 0, v_Y >= 0, v_X+v_Y-v_XY <= I(X;Y),
// 0 <= v_XY-v_Y <= H(X|Y), 0 <= v_XY-v_X <= H(Y|X).
struct OuterBoundReport {
  bool inside = true;
  double min_slack = 0.0;
  std::vector<BoundTerm> terms;     // all seven inequalities
  std::vector<BoundTerm> violated;  // slack < -tol
};

OuterBoundReport outer_bound_check(const JointPmf& p, const MiPoint& v,
                                   double tol = 1e-9);

// Vertices of the outer polytope (exact enumeration of its 7 half-spaces).
std::vector<Vec3> io_corners(const JointPmf& p);

// ============================================================================
// Achievable points
// ============================================================================

struct InnerPoint {
  MiPoint v;
  Channel witness;
  std::string tag;
};

// The five always-achievable points: U trivial, U=X, U=Y, U=(X,Y), and the
// conditional-entropy point (H(X|Y), H(Y|X), H(X|Y)+H(Y|X)) obtained by
// composing two functional representations and time-sharing with U=(X,Y).
std::vector<InnerPoint> inner_bound_points(const JointPmf& p);

enum class FrlDirection { x_to_y, y_to_x };

// Functional representation channel: for x_to_y, a V with V independent of X
// and H(Y|X,V) = 0, built by cutting [0,1) at the union of the breakpoints of
// all conditional CDFs F_{Y|X=x}. |V| <= |X|(|Y|-1)+1 after deduplication.
Channel frl_channel(const JointPmf& p, FrlDirection dir);

// ============================================================================
// Sampled region approximation
// ============================================================================

// Versioned default direction set: a level-2 subdivided icosahedron (162
// directions) plus the named support-function directions used by the scalar
// quantities, deduplicated.
extern const char* const k_direction_set_version;
std::vector<Vec3> default_directions();

struct HalfSpace {
  Vec3 b{};          // unit direction
  double psi_hat = 0.0;  // best known support value: b.v <= psi_hat holds for
                         // every sampled point by construction
};

struct RegionApprox {
  JointPmf p;
  std::vector<InnerPoint> inner;  // achieved points with witnesses
  Hull3 hull;                     // hull of the inner mi-points
  std::vector<HalfSpace> outer;
  // Per direction: support of the outer polytope minus support of the inner
  // set; 0 means the sandwich is pinched along that direction.
  std::vector<double> sandwich_gap;
  std::string direction_version;
  bool degenerate = false;  // affine dimension < 3
  OptimizerConfig cfg;
};

RegionApprox sample_region(const JointPmf& p, const std::vector<Vec3>& directions,
                           const OptimizerConfig& cfg);

// ============================================================================
// Membership
// ============================================================================

enum class Verdict { inside, outside, unknown };

struct MembershipVerdict {
  Verdict verdict = Verdict::unknown;
  // inside: convex combination of inner points (index, weight) and a
  // time-shared witness channel reproducing the queried point.
  std::vector<std::pair<int, double>> combination;
  std::optional<Channel> witness;
  // outside: the named inequality or sampled half-space that is violated.
  std::string violated;
  double violation = 0.0;
  // unknown: how far the query sits from the inner hull and from the outer
  // estimates.
  double inner_gap = 0.0;
  double outer_gap = 0.0;
};

MembershipVerdict membership(const JointPmf& p, const MiPoint& v,
                             const RegionApprox& approx);
// Convenience overload: builds a default-direction approximation first.
MembershipVerdict membership(const JointPmf& p, const MiPoint& v,
                             const OptimizerConfig& cfg);

// ============================================================================
// Rate regions (causal and noncausal side information)
// ============================================================================

struct RateVerdict {
  Verdict verdict = Verdict::unknown;
  std::optional<Channel> witness;
  MiPoint witness_point;
  double witness_violation = 0.0;  // max violation of the rate system at the witness
  std::string violated;            // outside: named inequality
  double violation = 0.0;
  double gap = 0.0;  // unknown: smallest max-violation found
};

// r is in the causal region iff some region point v satisfies
//   v_XY <= R0, v_X >= H(X)-R1, v_Y >= H(Y)-R2,
//   v_XY-v_Y >= H(X|Y)-R3, v_XY-v_X >= H(Y|X)-R4.
RateVerdict rate_membership(const JointPmf& p, const RateTuple& r,
                            const RegionApprox& approx, const OptimizerConfig& cfg);
RateVerdict rate_membership(const JointPmf& p, const RateTuple& r,
                            const OptimizerConfig& cfg);

// Noncausal region: the eleven-inequality system; four of them do not involve
// the channel and are checked statically first.
RateVerdict noncausal_rate_membership(const JointPmf& p, const RateTuple& r,
                                      const RegionApprox& approx,
                                      const OptimizerConfig& cfg);
RateVerdict noncausal_rate_membership(const JointPmf& p, const RateTuple& r,
                                      const OptimizerConfig& cfg);

// ============================================================================
// Affine projections (increasing hulls)
// ============================================================================

struct ProjectedRegion {
  std::string name;             // "gray-wyner" or "tension"
  std::vector<Vec3> points;     // images of the inner points
  std::vector<std::string> tags;
  bool increasing = true;       // region = conv(points) + nonnegative orthant
};

// (v_XY, H(X)-v_X, H(Y)-v_Y) per inner point.
ProjectedRegion gray_wyner_projection(const RegionApprox& approx, const JointPmf& p);
// (v_XY-v_X, v_XY-v_Y, I(X;Y)-v_X-v_Y+v_XY) per inner point.
ProjectedRegion tension_projection(const RegionApprox& approx, const JointPmf& p);

// Membership in conv(points) + [0,inf)^3, decided by linear programming.
bool projected_contains(const ProjectedRegion& reg, const Vec3& q, double tol = 1e-9);

// ============================================================================
// Multi-letter closure
// ============================================================================

// cl(I^infty) has two equivalent set expressions over the same base region:
//   form 1: (I + (-inf,0] x (-inf,0] x [0,inf)) intersect I^o
//   form 2: (I + {(t,t,t): t <= 0}) intersect ([0,inf)^2 x R)
// and two route characterizations (through the noncausal rate region and
// through the Gray-Wyner region). All four are evaluated over the hull of the
// sampled inner points.
struct ClInftyRegion {
  JointPmf p;
  std::vector<Vec3> generators;          // inner hull points (achieved)
  std::vector<std::string> generator_tags;
  std::vector<Vec3> corners;             // outer-polytope vertices
  std::vector<bool> corner_in_form1;     // membership of each corner, form 1
  std::vector<bool> corner_in_form2;
};

ClInftyRegion cl_infty_region(const RegionApprox& approx, const JointPmf& p);

enum class ClRoute { form1, form2, noncausal_rates, gray_wyner };

bool cl_member(const ClInftyRegion& reg, const Vec3& q, ClRoute route,
               double tol = 1e-9);

// Signed margin of q under form 1: min of the outer-bound slacks and the
// largest uniform tightening of the domination system that stays feasible.
// Positive well inside, negative well outside; used for boundary-band
// exclusion in the consistency check.
double cl_form1_margin(const ClInftyRegion& reg, const Vec3& q);

struct ClConsistencyCase {
  Vec3 q{};
  std::array<bool, 4> verdicts{};  // form1, form2, noncausal, gray-wyner
  double margin = 0.0;
};

struct ClConsistencyReport {
  int queries = 0;
  int band_excluded = 0;
  int agreements = 0;
  int disagreements = 0;
  double band = 1e-6;
  std::vector<ClConsistencyCase> disagreement_cases;
};

ClConsistencyReport cl_infty_consistency(const RegionApprox& approx,
                                         const JointPmf& p, int samples,
                                         std::uint64_t seed = 7,
                                         double band = 1e-6);

// ============================================================================
// Structural checks
// ============================================================================

struct SuperadditivityReport {
  int trials = 0;
  int inside = 0;
  bool all_inside = true;
  // worst |mi_point(product witness) - (v1+v2)|_inf over the trials
  double max_deviation = 0.0;
};

// Samples channel pairs (enumerated small deterministic ones first, then
// random rows), forms the product witness U=(U1,U2), and verifies that the
// coordinate sums are achieved exactly in the product source.
SuperadditivityReport superadditivity_check(const JointPmf& p1, const JointPmf& p2,
                                            const OptimizerConfig& cfg,
                                            int trials = 100);

// Degraded pair: X2 and Y2 are generated from X1 and Y1 through fixed
// conditionals, so X2 - X1 - Y1 - Y2 holds for every channel on (X1,Y1).
struct ChainSpec {
  JointPmf p1;
  int nx2 = 0;
  int ny2 = 0;
  std::vector<double> px2_given_x1;  // [x1*nx2 + x2], rows sum to 1
  std::vector<double> py2_given_y1;  // [y1*ny2 + y2], rows sum to 1
};

struct DataProcessingReport {
  int trials = 0;
  bool holds = true;
  std::array<double, 4> min_slack{};  // v_X, v_Y, v_XY and tension inequalities
};

DataProcessingReport data_processing_check(const ChainSpec& chain,
                                           const OptimizerConfig& cfg,
                                           int trials = 50);

}  // namespace egw
