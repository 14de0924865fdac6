#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "doctest.h"
#include "egw/errors.hpp"
#include "egw/region.hpp"

using namespace egw;

namespace {

OptimizerConfig fast_cfg(int restarts = 16) {
  OptimizerConfig cfg;
  cfg.restarts = restarts;
  cfg.seed = 1;
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("region");

TEST_CASE("mi_point satisfies the information identities on random inputs") {
  for (std::uint64_t s = 1; s <= 30; ++s) {
    const JointPmf p = corpus::random_pmf(s, 2 + s % 3, 2 + (s / 3) % 2);
    const Channel c = corpus::random_channel(500 + s, p.nx(), p.ny(),
                                             2 + static_cast<int>(s % 3));
    const MiPoint v = mi_point(p, c);
    const TriplePmf t = extend(p, c);
    CHECK(std::abs(v.vxy - (v.vx + t.iy_u_given_x())) <= 1e-10);
    CHECK(std::abs(v.vxy - (v.vy + t.ix_u_given_y())) <= 1e-10);
    CHECK(outer_bound_check(p, v).inside);
  }
}

TEST_CASE("outer bound report names all seven inequalities") {
  const JointPmf p = corpus::dsbs01();
  const OuterBoundReport rep = outer_bound_check(p, MiPoint{0.0, 0.0, 0.0});
  CHECK(rep.inside);
  CHECK(rep.terms.size() == 7);
  CHECK(rep.violated.empty());

  // v_XY - v_X > H(Y|X) is the only broken inequality at this point.
  const OuterBoundReport bad =
      outer_bound_check(p, MiPoint{0.0, 0.0, binary_entropy(0.1) + 0.05});
  CHECK(!bad.inside);
  REQUIRE(bad.violated.size() >= 1);
  CHECK(bad.min_slack < -0.04);
}

TEST_CASE("inner bound points are achieved and tagged") {
  const JointPmf p = corpus::asym22();
  const auto pts = inner_bound_points(p);
  REQUIRE(pts.size() == 5);
  for (const auto& ip : pts) {
    CHECK(!ip.tag.empty());
    const MiPoint direct = mi_point_of(p, ip.witness);
    CHECK(std::abs(direct.vx - ip.v.vx) <= 1e-9);
    CHECK(std::abs(direct.vy - ip.v.vy) <= 1e-9);
    CHECK(std::abs(direct.vxy - ip.v.vxy) <= 1e-9);
    CHECK(outer_bound_check(p, ip.v).inside);
  }
  // U = (X,Y) reaches (H(X), H(Y), H(X,Y)).
  bool found_joint = false;
  for (const auto& ip : pts)
    if (std::abs(ip.v.vxy - p.hxy()) <= 1e-9 &&
        std::abs(ip.v.vx - p.hx()) <= 1e-9)
      found_joint = true;
  CHECK(found_joint);
}

TEST_CASE("functional representation residuals are exact") {
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const JointPmf p = corpus::random_pmf(s * 7, 2 + s % 2, 2 + s % 3);
    const Channel v = frl_channel(p, FrlDirection::x_to_y);
    CHECK(v.u_size <= p.nx() * (p.ny() - 1) + 1);
    const TriplePmf t = extend(p, v);
    CHECK(t.ixu() <= 1e-12);
    CHECK(t.hy_given_xu() <= 1e-12);
    const Channel w = frl_channel(p, FrlDirection::y_to_x);
    const TriplePmf ty = extend(p, w);
    CHECK(ty.iyu() <= 1e-12);
    CHECK(ty.hx_given_yu() <= 1e-12);
    CHECK(w.u_size <= p.ny() * (p.nx() - 1) + 1);
  }
}

TEST_CASE("rate tuples map points to the five-rate corner formulas") {
  const JointPmf p = corpus::asym22();
  const MiPoint joint{p.hx(), p.hy(), p.hxy()};
  const RateTuple r = rate_tuple_of(p, joint);
  CHECK(r[0] == doctest::Approx(p.hxy()).epsilon(1e-12));
  for (int i = 1; i < 5; ++i) CHECK(std::abs(r[i]) <= 1e-9);
  CHECK_THROWS_AS(rate_tuple_of(p, MiPoint{2.0, 2.0, 10.0}), Error);
}

TEST_CASE("sampled region: sandwich structure and degeneracy flag") {
  const OptimizerConfig cfg = fast_cfg(12);
  const RegionApprox ind = sample_region(corpus::p_ind(), default_directions(), cfg);
  CHECK(!ind.degenerate);
  CHECK(ind.hull.dim == 3);
  CHECK(ind.direction_version == std::string(k_direction_set_version));
  REQUIRE(ind.outer.size() == ind.sandwich_gap.size());
  for (double g : ind.sandwich_gap) CHECK(g >= -1e-9);

  // Perfectly correlated bits: every achievable point has v_X = v_Y = v_XY,
  // so the inner hull is a segment and the approximation reports degeneracy.
  const RegionApprox eq = sample_region(corpus::p_eq(), default_directions(), cfg);
  CHECK(eq.degenerate);
  CHECK(eq.hull.dim <= 1);
}

TEST_CASE("membership verdicts come with certificates") {
  const JointPmf p = corpus::p_ind();
  const OptimizerConfig cfg = fast_cfg(12);
  const RegionApprox approx = sample_region(p, default_directions(), cfg);

  // Midpoint of the segment from the origin to the U=(X,Y) point.
  const MembershipVerdict in = membership(p, MiPoint{0.5, 0.5, 1.0}, approx);
  CHECK(in.verdict == Verdict::inside);
  REQUIRE(in.witness.has_value());
  const MiPoint v = mi_point_of(p, *in.witness);
  CHECK(std::abs(v.vx - 0.5) <= 1e-8);
  CHECK(std::abs(v.vy - 0.5) <= 1e-8);
  CHECK(std::abs(v.vxy - 1.0) <= 1e-8);
  double wsum = 0.0;
  for (const auto& [idx, w] : in.combination) {
    CHECK(w >= -1e-12);
    wsum += w;
  }
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-9));

  const MembershipVerdict out = membership(p, MiPoint{1.0, 1.0, 3.0}, approx);
  CHECK(out.verdict == Verdict::outside);
  CHECK(!out.violated.empty());
  CHECK(out.violation > 0.0);
}

TEST_CASE("rate membership: corner inside, below-zero outside with certificate") {
  const JointPmf p = corpus::asym22();
  const OptimizerConfig cfg = fast_cfg(12);
  const RegionApprox approx = sample_region(p, default_directions(), cfg);

  RateTuple corner;
  corner.r = {p.hxy(), 0.0, 0.0, 0.0, 0.0};
  const RateVerdict in = rate_membership(p, corner, approx, cfg);
  CHECK(in.verdict == Verdict::inside);
  CHECK(in.witness_violation <= 1e-6);

  RateTuple zero;
  zero.r = {0.0, 0.0, 0.0, 0.0, 0.0};
  const RateVerdict out = rate_membership(p, zero, approx, cfg);
  CHECK(out.verdict == Verdict::outside);
  CHECK(!out.violated.empty());

  const RateVerdict nc_in = noncausal_rate_membership(p, corner, approx, cfg);
  CHECK(nc_in.verdict == Verdict::inside);
  const RateVerdict nc_out = noncausal_rate_membership(p, zero, approx, cfg);
  CHECK(nc_out.verdict == Verdict::outside);
}

TEST_CASE("projections use the documented affine maps") {
  const JointPmf p = corpus::dsbs01();
  const OptimizerConfig cfg = fast_cfg(12);
  const RegionApprox approx = sample_region(p, default_directions(), cfg);

  const ProjectedRegion gw = gray_wyner_projection(approx, p);
  REQUIRE(gw.points.size() == approx.inner.size());
  for (size_t i = 0; i < gw.points.size(); ++i) {
    const MiPoint& v = approx.inner[i].v;
    CHECK(gw.points[i][0] == doctest::Approx(v.vxy).epsilon(1e-12));
    CHECK(gw.points[i][1] == doctest::Approx(p.hx() - v.vx).epsilon(1e-12));
    CHECK(gw.points[i][2] == doctest::Approx(p.hy() - v.vy).epsilon(1e-12));
    CHECK(projected_contains(gw, gw.points[i]));
  }
  // Anything with a negative coordinate below the whole point set is out.
  CHECK(!projected_contains(gw, {-0.05, 10.0, 10.0}));

  const ProjectedRegion tn = tension_projection(approx, p);
  for (size_t i = 0; i < tn.points.size(); ++i) {
    const MiPoint& v = approx.inner[i].v;
    CHECK(tn.points[i][0] == doctest::Approx(v.vxy - v.vx).epsilon(1e-12));
    CHECK(tn.points[i][1] == doctest::Approx(v.vxy - v.vy).epsilon(1e-12));
    CHECK(tn.points[i][2] ==
          doctest::Approx(p.mutual_information() - v.vx - v.vy + v.vxy)
              .epsilon(1e-12));
  }
}

TEST_CASE("multi-letter closure: the two set forms agree on the corners") {
  const JointPmf p = corpus::p_l();
  const OptimizerConfig cfg = fast_cfg(12);
  const RegionApprox approx = sample_region(p, default_directions(), cfg);
  const ClInftyRegion reg = cl_infty_region(approx, p);
  REQUIRE(reg.corners.size() >= 4);
  REQUIRE(reg.corner_in_form1.size() == reg.corners.size());
  for (size_t i = 0; i < reg.corners.size(); ++i)
    CHECK(reg.corner_in_form1[i] == reg.corner_in_form2[i]);

  // Achieved generators are members along every route.
  for (const Vec3& g : reg.generators) {
    CHECK(cl_member(reg, g, ClRoute::form1));
    CHECK(cl_member(reg, g, ClRoute::form2));
    CHECK(cl_member(reg, g, ClRoute::noncausal_rates));
    CHECK(cl_member(reg, g, ClRoute::gray_wyner));
  }

  const ClConsistencyReport rep = cl_infty_consistency(approx, p, 60, 7);
  CHECK(rep.queries == 60);
  CHECK(rep.disagreements == 0);
  CHECK(rep.agreements + rep.band_excluded == rep.queries);
}

TEST_CASE("superadditivity: product witnesses land on coordinate sums") {
  const OptimizerConfig cfg = fast_cfg(8);
  const SuperadditivityReport rep =
      superadditivity_check(corpus::p_ind(), corpus::dsbs01(), cfg, 25);
  CHECK(rep.trials == 25);
  CHECK(rep.all_inside);
  CHECK(rep.inside == 25);
  CHECK(rep.max_deviation <= 1e-9);
}

TEST_CASE("degraded chains never gain information") {
  ChainSpec chain;
  chain.p1 = corpus::dsbs01();
  chain.nx2 = 2;
  chain.ny2 = 2;
  chain.px2_given_x1 = {0.8, 0.2, 0.2, 0.8};
  chain.py2_given_y1 = {1.0, 0.0, 0.0, 1.0};
  const DataProcessingReport rep = data_processing_check(chain, fast_cfg(8), 20);
  CHECK(rep.trials == 20);
  CHECK(rep.holds);
  for (double s : rep.min_slack) CHECK(s >= -1e-9);
}

TEST_SUITE_END();
