#include <algorithm>
#include <cmath>

#include "corpus.hpp"
#include "doctest.h"
#include "egw/graph.hpp"

using namespace egw;

TEST_SUITE_BEGIN("graph");

TEST_CASE("support components and common part") {
  const ComponentLabeling one = support_components(corpus::p_l());
  CHECK(one.count == 1);
  CHECK(one.mass[0] == doctest::Approx(1.0).epsilon(1e-12));

  const ComponentLabeling two = support_components(corpus::two_block44());
  CHECK(two.count == 2);
  CHECK(two.mass[0] == doctest::Approx(0.5).epsilon(1e-12));

  const GacsKornerResult gk = gacs_korner(corpus::two_block44());
  CHECK(gk.value_bits == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gacs_korner(corpus::p_l()).value_bits == 0.0);
  CHECK(gacs_korner(corpus::p_eq()).value_bits ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("planted blocks recover their component entropy exactly") {
  for (std::uint64_t s = 1; s <= 10; ++s) {
    double h = 0.0;
    const JointPmf p = corpus::planted_blocks(s, 2 + static_cast<int>(s % 3), &h);
    const GacsKornerResult gk = gacs_korner(p);
    CHECK(gk.components.count == 2 + static_cast<int>(s % 3));
    CHECK(gk.value_bits == doctest::Approx(h).epsilon(1e-13));
  }
}

TEST_CASE("length-3 path detection") {
  CHECK(has_path_length_3(corpus::p_l()).has_value());
  CHECK(!has_path_length_3(corpus::p_eq()).has_value());
  CHECK(has_path_length_3(corpus::two_block44()).has_value());
  const auto w = has_path_length_3(corpus::p_l());
  // All three named cells must be in support, with distinct symbols.
  const JointPmf p = corpus::p_l();
  CHECK(p.at(w->x1, w->y1) > 0.0);
  CHECK(p.at(w->x1, w->y2) > 0.0);
  CHECK(p.at(w->x2, w->y1) > 0.0);
  CHECK(w->x1 != w->x2);
  CHECK(w->y1 != w->y2);
}

TEST_CASE("alternating cycle detection") {
  CHECK(!find_cycle(corpus::p_l()).has_value());
  CHECK(!find_cycle(corpus::p_eq()).has_value());
  const auto c = find_cycle(corpus::uniform33());
  REQUIRE(c.has_value());
  const JointPmf p = corpus::uniform33();
  const int a = static_cast<int>(c->xs.size());
  REQUIRE(a >= 2);
  REQUIRE(static_cast<int>(c->ys.size()) == a);
  for (int i = 0; i < a; ++i) {
    CHECK(p.at(c->xs[static_cast<size_t>(i)], c->ys[static_cast<size_t>(i)]) > 0.0);
    CHECK(p.at(c->xs[static_cast<size_t>(i)],
               c->ys[static_cast<size_t>((i + 1) % a)]) > 0.0);
  }
  // Pentagon support has odd girth but still contains an alternating cycle
  // through all five symbols.
  CHECK(find_cycle(corpus::pentagon()).has_value());
}

TEST_CASE("confusability graph of the pentagon is the 5-cycle") {
  const ConfusabilityGraph g = confusability_graph(corpus::pentagon());
  REQUIRE(g.n == 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      const bool cyc = (j == (i + 1) % 5) || (i == (j + 1) % 5);
      CHECK(g.adj[static_cast<size_t>(i)][static_cast<size_t>(j)] == cyc);
    }
  const auto sets = independent_sets(g);
  // The 5-cycle has exactly five maximal independent sets, all of size 2.
  REQUIRE(sets.size() == 5);
  for (const auto& s : sets) CHECK(s.size() == 2);
}

TEST_CASE("maximum condition") {
  CHECK(max_condition_check(corpus::p_ind()).holds);
  CHECK(max_condition_check(corpus::p_eq()).holds);
  CHECK(max_condition_check(corpus::dsbs01()).holds);
  CHECK(max_condition_check(corpus::uniform33()).holds);
  CHECK(max_condition_check(corpus::pentagon()).holds);
  CHECK(!max_condition_check(corpus::p_l()).holds);
  CHECK(!max_condition_check(corpus::asym22()).holds);
  const MaxConditionResult bad = max_condition_check(corpus::asym22());
  CHECK(bad.worst_pair_gap > 0.0);
}

TEST_SUITE_END();
