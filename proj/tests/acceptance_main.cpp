// ============================================================
// Release gate: one check per shipping criterion, one line each.
// Usage: egw_acceptance <tool-binary> <data-dir>
// ============================================================

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "egw/graph.hpp"
#include "egw/json_io.hpp"
#include "egw/optimize.hpp"
#include "egw/quantities.hpp"
#include "egw/region.hpp"

namespace {

#define REQUIRE(cond, msg)                                                      \
  do {                                                                          \
    if (!(cond)) {                                                              \
      std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " << msg       \
                << "\n";                                                        \
      std::exit(1);                                                             \
    }                                                                           \
  } while (0)

std::string g_bin;
std::string g_data;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

void pass(int n, const char* label, const Timer& t) {
  std::printf("[PASS] criterion %02d: %s (%.1f s)\n", n, label, t.seconds());
  std::fflush(stdout);
}

egw::OptimizerConfig cfg_with(int restarts) {
  egw::OptimizerConfig cfg;
  cfg.restarts = restarts;
  cfg.seed = 1;
  return cfg;
}

// ------------------------------------------------------------
// 1. Chain-rule identity and outer bound on random channels.
// ------------------------------------------------------------
void criterion_01() {
  Timer t;
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t s = 100 + static_cast<std::uint64_t>(i);
    const int nx = 2 + i % 3, ny = 2 + (i / 3) % 3;
    const egw::JointPmf p =
        corpus::random_pmf(s, nx, ny, i % 4 == 0 ? 0.25 : 0.0);
    const egw::Channel c =
        corpus::random_channel(9000 + s, p.nx(), p.ny(), 2 + i % 4);
    const egw::MiPoint v = egw::mi_point(p, c);
    const egw::TriplePmf tr = egw::extend(p, c);
    REQUIRE(std::abs(v.vxy - (v.vx + tr.iy_u_given_x())) <= 1e-10,
            "identity I(X,Y;U) = I(X;U) + I(Y;U|X) broken at trial " << i);
    REQUIRE(std::abs(v.vxy - (v.vy + tr.ix_u_given_y())) <= 1e-10,
            "identity I(X,Y;U) = I(Y;U) + I(X;U|Y) broken at trial " << i);
    const egw::OuterBoundReport rep = egw::outer_bound_check(p, v, 1e-9);
    REQUIRE(rep.inside, "achieved point escapes the outer bound at trial "
                            << i << " (slack " << rep.min_slack << ")");
  }
  REQUIRE(t.seconds() < 10.0, "identity suite exceeded 10 s");
  pass(1, "chain-rule identities and outer bound on 100 random channels", t);
}

// ------------------------------------------------------------
// 2. Common part: exact graph value vs directional derivative.
// ------------------------------------------------------------
void criterion_02() {
  Timer t;
  const egw::OptimizerConfig cfg = cfg_with(16);
  for (int i = 0; i < 20; ++i) {
    double planted = 0.0;
    const egw::JointPmf p = corpus::planted_blocks(
        7000 + static_cast<std::uint64_t>(i), 2 + i % 2, &planted);
    const egw::QuantityResult gk = egw::gacs_korner_ci(p, cfg);
    REQUIRE(std::abs(gk.value - planted) <= 1e-12,
            "exact common-part entropy off planted value at trial "
                << i << ": " << gk.value << " vs " << planted);
    const double dd = gk.residuals.at("optimizer_value");
    REQUIRE(std::abs(gk.value - dd) <= 1e-3,
            "directional-derivative cross value off at trial "
                << i << ": " << dd << " vs exact " << gk.value);
  }
  REQUIRE(t.seconds() < 30.0, "common-part suite exceeded 30 s");
  pass(2, "common part matches psi'(1,1,-2; 0,0,1) on 20 planted pmfs", t);
}

// ------------------------------------------------------------
// 3. Interaction maxima on independent uniform bits.
// ------------------------------------------------------------
void criterion_03() {
  Timer t;
  const egw::BoundsReport b = egw::bounds_report(corpus::p_ind(), cfg_with(64));
  for (const egw::QuantityResult* q : {&b.nni, &b.pni, &b.ppi}) {
    REQUIRE(std::abs(q->value - 1.0) <= 1e-3,
            q->name << " off 1.0: " << q->value);
    REQUIRE(std::abs(q->residuals.at("optimizer_value") - 1.0) <= 1e-3,
            q->name << " optimizer cross off 1.0: "
                    << q->residuals.at("optimizer_value"));
  }
  // Each attaining channel is independent of its conditioning coordinate.
  const egw::TriplePmf tp = egw::extend(corpus::p_ind(), b.ppi.witness);
  REQUIRE(tp.ixu() <= 1e-9, "ppi witness leaks I(X;U) = " << tp.ixu());
  REQUIRE(tp.iyu() <= 1e-9, "ppi witness leaks I(Y;U) = " << tp.iyu());
  REQUIRE(egw::extend(corpus::p_ind(), b.nni.witness).ixu() <= 1e-9,
          "nni witness leaks I(X;U)");
  REQUIRE(egw::extend(corpus::p_ind(), b.pni.witness).ixu() <= 1e-9,
          "pni witness leaks I(X;U)");
  REQUIRE(t.seconds() < 10.0, "interaction suite exceeded 10 s");
  pass(3, "all three interaction maxima reach 1.0 on independent bits", t);
}

// ------------------------------------------------------------
// 4. Support-graph zero conditions vs the optimizer.
// ------------------------------------------------------------
void criterion_04() {
  Timer t;
  const egw::OptimizerConfig cfg = cfg_with(24);
  int zero_nni = 0, zero_ppi = 0, pos_nni = 0, pos_ppi = 0;
  for (int i = 0; i < 50; ++i) {
    const std::uint64_t s = 4000 + static_cast<std::uint64_t>(i);
    const double zp = (i % 5 == 0) ? 0.0 : (i % 2 ? 0.55 : 0.35);
    const egw::JointPmf p = corpus::random_pmf(s, 3, 3, zp);
    const auto path = egw::has_path_length_3(p);
    const auto cyc = egw::find_cycle(p);

    const egw::QuantityResult nni = egw::g_nni(p, cfg);
    const double nni_opt = nni.method == "optimizer"
                               ? nni.value
                               : nni.residuals.at("optimizer_value");
    if (!path.has_value()) {
      ++zero_nni;
      REQUIRE(nni.value == 0.0,
              "no length-3 path but nni = " << nni.value << " at trial " << i);
      REQUIRE(nni_opt <= 1e-4,
              "optimizer disagrees with nni zero predicate at trial "
                  << i << ": " << nni_opt);
    } else {
      ++pos_nni;
      const egw::Channel w = egw::path_witness_channel(p, *path);
      const egw::TriplePmf tr = egw::extend(p, w);
      REQUIRE(tr.ixu() <= 1e-9, "path witness not independent of X");
      REQUIRE(tr.ix_u_given_y() - tr.ixu() > 1e-6,
              "path witness objective too small at trial "
                  << i << ": " << tr.ix_u_given_y() - tr.ixu());
    }

    const egw::QuantityResult ppi = egw::g_ppi(p, cfg);
    const double ppi_opt = ppi.method == "optimizer"
                               ? ppi.value
                               : ppi.residuals.at("optimizer_value");
    if (!cyc.has_value()) {
      ++zero_ppi;
      REQUIRE(ppi.value == 0.0,
              "no alternating cycle but ppi = " << ppi.value << " at trial " << i);
      REQUIRE(ppi_opt <= 1e-4,
              "optimizer disagrees with ppi zero predicate at trial "
                  << i << ": " << ppi_opt);
    } else {
      ++pos_ppi;
      const egw::Channel w = egw::cycle_witness_channel(p, *cyc);
      const egw::TriplePmf tr = egw::extend(p, w);
      REQUIRE(tr.ixu() <= 1e-9 && tr.iyu() <= 1e-9,
              "cycle witness not independent at trial " << i);
      REQUIRE(tr.ixyu() > 1e-6,
              "cycle witness objective too small at trial " << i << ": "
                                                            << tr.ixyu());
    }
  }
  // The sample must exercise both sides of both predicates.
  REQUIRE(zero_nni >= 5 && pos_nni >= 5 && zero_ppi >= 5 && pos_ppi >= 5,
          "predicate sides unbalanced: " << zero_nni << "/" << pos_nni << " "
                                         << zero_ppi << "/" << pos_ppi);
  REQUIRE(t.seconds() < 120.0, "zero-condition suite exceeded 2 min");
  pass(4, "support-graph zero predicates agree with the optimizer (50 pmfs)", t);
}

// ------------------------------------------------------------
// 5. Binary symmetric pair vs the exhaustive scan.
// ------------------------------------------------------------
void criterion_05() {
  Timer t;
  const egw::JointPmf p = corpus::dsbs01();
  egw::ConstraintSpec cons;
  cons.structural = {egw::Structural::markov_x_u_y};
  const egw::SolveResult oracle =
      egw::grid_oracle(p, {{0.0, 0.0, -1.0}}, cons, 2, 0.01);
  const double oracle_value = -oracle.value;
  REQUIRE(std::abs(oracle_value - 0.8722384329) <= 1e-9,
          "exhaustive scan drifted from its locked value: " << oracle_value);
  const egw::QuantityResult w = egw::wyner_ci(p, cfg_with(64));
  REQUIRE(std::abs(w.value - oracle_value) <= 1e-3,
          "optimizer vs exhaustive scan: " << w.value << " vs " << oracle_value);
  REQUIRE(t.seconds() < 60.0, "scan suite exceeded 1 min");
  pass(5, "common-information optimizer matches the exhaustive scan", t);
}

// ------------------------------------------------------------
// 6. Pentagon graph entropy.
// ------------------------------------------------------------
void criterion_06() {
  Timer t;
  const egw::QuantityResult k =
      egw::korner_graph_entropy(corpus::pentagon(), cfg_with(64));
  REQUIRE(std::abs(k.value - std::log2(2.5)) <= 1e-6,
          "pentagon graph entropy off log2(5/2): " << k.value);
  REQUIRE(std::abs(k.residuals.at("optimizer_value") - k.value) <= 1e-3,
          "channel-space cross solve off: " << k.residuals.at("optimizer_value"));
  REQUIRE(t.seconds() < 30.0, "graph-entropy suite exceeded 30 s");
  pass(6, "pentagon graph entropy equals log2(5/2) with channel cross-check", t);
}

// ------------------------------------------------------------
// 7. Interaction chain on every corpus pmf.
// ------------------------------------------------------------
void criterion_07() {
  Timer t;
  std::vector<egw::JointPmf> corpus_pmfs = {
      corpus::p_ind(),  corpus::p_eq(), corpus::p_l(),     corpus::dsbs01(),
      corpus::asym22(), corpus::uniform33(), corpus::two_block44()};
  for (int i = 0; i < 20; ++i)
    corpus_pmfs.push_back(corpus::random_pmf(7100 + static_cast<std::uint64_t>(i),
                                             2 + i % 2, 2 + i % 3,
                                             i % 3 == 0 ? 0.3 : 0.0));
  const egw::OptimizerConfig cfg = cfg_with(24);
  for (size_t i = 0; i < corpus_pmfs.size(); ++i) {
    const egw::BoundsReport b = egw::bounds_report(corpus_pmfs[i], cfg);
    REQUIRE(b.chain_ok && b.worst_violation <= 1e-6,
            "interaction chain broken on corpus pmf " << i << " (violation "
                                                      << b.worst_violation << ")");
    REQUIRE(b.ppi.value >= -1e-6 && b.ppi.value <= b.pni.value + 1e-6 &&
                b.pni.value <= b.nni.value + 1e-6 &&
                b.nni.value <= b.upper + 1e-6,
            "chain ordering broken on corpus pmf " << i);
  }
  pass(7, "0 <= ppi <= pni <= nni <= min conditional entropy on the corpus", t);
}

// ------------------------------------------------------------
// 8. Permutation decomposition on independent uniform 3x3.
// ------------------------------------------------------------
void criterion_08() {
  Timer t;
  const egw::JointPmf p = corpus::uniform33();
  const egw::Channel c = egw::bvn_channel(p);
  const egw::TriplePmf tr = egw::extend(p, c);
  REQUIRE(std::abs(tr.ixyu() - std::log2(3.0)) <= 1e-9,
          "achieved interaction off H(Y|X) = log2 3: " << tr.ixyu());
  REQUIRE(tr.ixu() <= 1e-9, "I(X;U) residual " << tr.ixu());
  REQUIRE(tr.iyu() <= 1e-9, "I(Y;U) residual " << tr.iyu());
  REQUIRE(tr.hy_given_xu() <= 1e-9, "H(Y|X,U) residual " << tr.hy_given_xu());
  REQUIRE(tr.hx_given_yu() <= 1e-9, "H(X|Y,U) residual " << tr.hx_given_yu());
  pass(8, "permutation decomposition achieves log2(3) with exact residuals", t);
}

// ------------------------------------------------------------
// 9. Functional representation on 50 random pmfs.
// ------------------------------------------------------------
void criterion_09() {
  Timer t;
  for (int i = 0; i < 50; ++i) {
    const egw::JointPmf p =
        corpus::random_pmf(900 + static_cast<std::uint64_t>(i), 2 + i % 3,
                           2 + (i / 2) % 3, i % 4 == 0 ? 0.3 : 0.0);
    const egw::Channel v = egw::frl_channel(p, egw::FrlDirection::x_to_y);
    REQUIRE(v.u_size <= p.nx() * (p.ny() - 1) + 1,
            "cardinality bound broken at trial " << i << ": " << v.u_size);
    const egw::TriplePmf tr = egw::extend(p, v);
    REQUIRE(tr.ixu() <= 1e-12, "V not independent of X at trial " << i << ": "
                                                                  << tr.ixu());
    REQUIRE(tr.hy_given_xu() <= 1e-12,
            "H(Y|X,V) nonzero at trial " << i << ": " << tr.hy_given_xu());
  }
  pass(9, "functional representation exact on 50 random pmfs", t);
}

// ------------------------------------------------------------
// 10. Independent pairs: lower bound and closed-form integral.
// ------------------------------------------------------------
void criterion_10() {
  Timer t;
  auto quad = [](double a, double b) {
    double acc = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const double u = (i + 0.5) / n;
      double len = 0.0;
      if (u + a <= 1.0)
        len = std::max(0.0, std::min(b, u + a) - u);
      else
        len = std::max(0.0, b - u) + std::min(b, u + a - 1.0);
      acc += egw::nlog2n(len) / n;
    }
    return acc;
  };
  for (int i = 0; i < 20; ++i) {
    const egw::JointPmf p = corpus::random_independent_pmf(
        600 + static_cast<std::uint64_t>(i), 2 + i % 3, 2 + (i / 3) % 3);
    REQUIRE(egw::achieved_indep_value(p) >= egw::indep_lower_bound(p) - 1e-9,
            "achieved value below the lower bound at trial " << i);
    const auto px = p.marginal_x();
    const auto py = p.marginal_y();
    const double f = egw::f_integral(px[0], py[0]);
    REQUIRE(std::abs(f - quad(px[0], py[0])) <= 1e-6,
            "closed form vs quadrature at trial " << i << ": " << f << " vs "
                                                  << quad(px[0], py[0]));
  }
  pass(10, "independent-pair construction beats its lower bound (20 pmfs)", t);
}

// ------------------------------------------------------------
// 11. Additivity under products.
// ------------------------------------------------------------
void criterion_11() {
  Timer t;
  const egw::SuperadditivityReport rep = egw::superadditivity_check(
      corpus::random_pmf(501, 2, 2), corpus::random_pmf(502, 2, 2),
      cfg_with(8), 100);
  REQUIRE(rep.trials == 100 && rep.all_inside && rep.inside == 100,
          "product-witness sums not all inside: " << rep.inside << "/100");
  REQUIRE(rep.max_deviation <= 1e-9,
          "product witness misses the coordinate sum by " << rep.max_deviation);

  for (int i = 0; i < 10; ++i) {
    const egw::JointPmf p =
        corpus::random_pmf(520 + static_cast<std::uint64_t>(i), 2, 2);
    const egw::QuantityResult one = egw::g_ppi(p, cfg_with(24));
    egw::OptimizerConfig pcfg = cfg_with(8);
    pcfg.extra_seeds.push_back(egw::product_channel(one.witness, one.witness));
    const egw::QuantityResult two = egw::g_ppi(egw::tensor_power(p, 2), pcfg);
    REQUIRE(two.value >= 2.0 * one.value - 2e-3,
            "interaction not superadditive at trial " << i << ": " << two.value
                                                      << " vs 2*" << one.value);
  }
  pass(11, "interaction superadditive under independent products", t);
}

// ------------------------------------------------------------
// 12. Multi-letter closure: all four routes agree.
// ------------------------------------------------------------
void criterion_12() {
  Timer t;
  const egw::OptimizerConfig cfg = cfg_with(16);
  int i = 0;
  for (const egw::JointPmf& p :
       {corpus::p_l(), corpus::asym22(), corpus::dsbs01()}) {
    const egw::RegionApprox approx =
        egw::sample_region(p, egw::default_directions(), cfg);
    const egw::ClConsistencyReport rep =
        egw::cl_infty_consistency(approx, p, 100, 7);
    REQUIRE(rep.queries == 100, "query count off on pmf " << i);
    REQUIRE(rep.disagreements == 0,
            rep.disagreements << " route disagreements on pmf " << i);
    REQUIRE(rep.agreements + rep.band_excluded == rep.queries,
            "query accounting broken on pmf " << i);
    REQUIRE(rep.agreements >= 60,
            "too many band exclusions on pmf " << i << ": " << rep.agreements);
    ++i;
  }
  pass(12, "closure forms and rate-region routes agree on 100 queries x 3 pmfs", t);
}

// ------------------------------------------------------------
// 13. Rate round trip and perturbed corners.
// ------------------------------------------------------------
void criterion_13() {
  Timer t;
  const egw::JointPmf p = corpus::asym22();
  const egw::OptimizerConfig cfg = cfg_with(16);
  const egw::RegionApprox approx =
      egw::sample_region(p, egw::default_directions(), cfg);

  for (int i = 0; i < 100; ++i) {
    const egw::Channel c =
        corpus::random_channel(1300 + static_cast<std::uint64_t>(i), 2, 2,
                               2 + i % 3);
    const egw::MiPoint v = egw::mi_point(p, c);
    const egw::RateTuple r = egw::rate_tuple_of(p, v);
    // The generating channel is the natural membership certificate; hand it
    // to the solver as a warm start and let the verdict re-verify it.
    egw::OptimizerConfig qcfg = cfg_with(4);
    qcfg.extra_seeds.push_back(c);
    const egw::RateVerdict verdict = egw::rate_membership(p, r, approx, qcfg);
    REQUIRE(verdict.verdict == egw::Verdict::inside,
            "achieved rate tuple not inside at trial " << i);
    REQUIRE(verdict.witness_violation <= 1e-6,
            "inside witness violates the rate system by "
                << verdict.witness_violation << " at trial " << i);
  }

  // Tight corner: the U = (X,Y) point pins all five rates; pushing any one
  // 0.01 below leaves the region with a named certificate.
  egw::RateTuple corner;
  corner.r = {p.hxy(), 0.0, 0.0, 0.0, 0.0};
  REQUIRE(egw::rate_membership(p, corner, approx, cfg).verdict ==
              egw::Verdict::inside,
          "tight corner itself must be inside");
  for (int k = 0; k < 5; ++k) {
    egw::RateTuple pert = corner;
    pert[k] -= 0.01;
    const egw::RateVerdict verdict = egw::rate_membership(p, pert, approx, cfg);
    REQUIRE(verdict.verdict == egw::Verdict::outside,
            "corner perturbed at coordinate " << k << " not outside");
    REQUIRE(!verdict.violated.empty(),
            "outside verdict lacks a named certificate at coordinate " << k);
  }
  pass(13, "100 achieved rate tuples inside; perturbed corners certified out", t);
}

// ------------------------------------------------------------
// 14. Byte determinism of the command line tool.
// ------------------------------------------------------------
std::string run_to_string(const std::string& args, int expect_exit) {
  const std::string tmp = "/tmp/egw_acc_out.txt";
  const std::string cmd = g_bin + " " + args + " > " + tmp + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  const int code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  REQUIRE(code == expect_exit,
          "command '" << args << "' exited " << code << ", expected "
                      << expect_exit);
  std::ifstream in(tmp, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_14() {
  Timer t;
  REQUIRE(!g_bin.empty(), "tool binary path missing (build with tools enabled)");
  const std::vector<std::pair<std::string, int>> commands = {
      {"quantities " + g_data + "/p_l.json", 0},
      {"quantities " + g_data + "/p_ind.json --only "
       "g_nni,indep_lower_bound,achieved_indep_value",
       0},
      {"region " + g_data + "/dsbs01.json --samples --csv", 0},
      {"region " + g_data + "/p_ind.json --support=-1,-1,1", 0},
      {"region " + g_data + "/p_ind.json --member 0.5,0.5,1.0", 0},
      {"rates " + g_data + "/asym22.json --tuple 1.721928,0,0,0,0", 0},
      {"rates " + g_data + "/asym22.json --tuple 0,0,0,0,0 --noncausal", 0},
      {"curve " + g_data + "/p_eq.json --kind ib --t-grid 0:0.25:1 --csv", 0},
      {"curve " + g_data + "/p_eq.json --kind synth --t-grid 0,0.5,1", 0},
      {"witness " + g_data + "/uniform33.json --kind bvn", 0},
      {"witness " + g_data + "/p_ind.json --kind frl --direction x", 0},
      {"witness " + g_data + "/p_l.json --kind path", 0},
      {"witness " + g_data + "/p_ind.json --kind indep --m 4", 0},
      {"witness " + g_data + "/p_l.json --kind cycle", 4},
      {"graph " + g_data + "/pentagon.json", 0},
  };
  for (const auto& [args, expect] : commands) {
    const std::string first = run_to_string(args, expect);
    const std::string second = run_to_string(args, expect);
    REQUIRE(!first.empty(), "no output from '" << args << "'");
    REQUIRE(first == second, "output of '" << args << "' not byte-identical");
  }
  pass(14, "15 tool commands byte-identical across repeated runs", t);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: egw_acceptance <tool-binary> <data-dir>\n";
    return 2;
  }
  g_bin = argv[1];
  g_data = argv[2];
  Timer total;
  criterion_01();
  criterion_02();
  criterion_03();
  criterion_04();
  criterion_05();
  criterion_06();
  criterion_07();
  criterion_08();
  criterion_09();
  criterion_10();
  criterion_11();
  criterion_12();
  criterion_13();
  criterion_14();
  std::printf("all 14 criteria passed in %.1f s\n", total.seconds());
  return 0;
}
