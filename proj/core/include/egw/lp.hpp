#pragma once

#include <vector>

namespace egw {

// Small dense linear programs in the form
//   maximize c.x  subject to  row_i . x (<=|==|>=) b_i,  x >= 0.
// Solved with a two-phase primal simplex using Bland's rule. Sized for the
// region machinery (tens of rows, up to a few hundred columns).
struct LpRow {
  std::vector<double> a;
  int rel;  // -1: <=, 0: ==, +1: >=
  double b;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double value = 0.0;
  std::vector<double> x;
};

LpResult solve_lp(int nvars, const std::vector<double>& c,
                  const std::vector<LpRow>& rows);

}  // namespace egw
