#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "reserveopt/types.hpp"

namespace reserveopt {

inline constexpr double kLpInf = std::numeric_limits<double>::infinity();

enum class Relation { le, eq, ge };

struct LpConstraint {
  std::vector<std::pair<int, double>> coeffs;  // sparse (variable, coefficient)
  Relation rel = Relation::le;
  double rhs = 0.0;
  std::string name;
};

/// min c'x  s.t.  rows, lower <= x <= upper. Bounds may be +-inf.
struct LpProblem {
  std::vector<double> lower, upper, objective;
  std::vector<std::string> var_names;
  std::vector<LpConstraint> rows;
  double objective_constant = 0.0;

  int n_vars() const { return static_cast<int>(objective.size()); }
  int add_variable(double lo, double up, double cost, std::string name = {});
  void add_row(std::vector<std::pair<int, double>> coeffs, Relation rel, double rhs,
               std::string name = {});
  std::vector<std::string> validate() const;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double objective = 0.0;  // includes objective_constant
  std::vector<double> duals;          // per row
  std::vector<bool> binding;          // per row
  std::vector<double> reduced_costs;  // per variable, zero for basics
  int iterations = 0;

  double row_activity(const LpProblem& p, int row) const;
};

struct LpOptions {
  double feas_tol = 1e-8;  // relative primal feasibility
  double opt_tol = 1e-8;   // reduced-cost tolerance (relative to cost scale)
  int max_iterations = 50000;
  int bland_after_degenerate = 40;  // consecutive degenerate pivots before Bland's rule
};

/// Bounded-variable primal simplex, two-phase. Deterministic for fixed
/// input: Dantzig pricing with lowest-index tie-breaks, switching to
/// Bland's rule after a degenerate streak.
LpSolution solve_lp(const LpProblem& p, const LpOptions& opts = {});

/// Text dump, one constraint per line: `name: coeffs relation rhs`.
void dump_lp(std::ostream& os, const LpProblem& p);

/// Segment variables for a convex piecewise-linear cost over
/// [g_min, g_max]. Adds one variable per breakpoint interval, bounded by
/// the interval width, priced at the marginal rate. The represented
/// output is g_min + sum(segments); `cost_offset` is the cost at g_min.
/// Rejects non-convex curves (decreasing marginals).
struct SegmentBlock {
  int first_var = -1;
  int count = 0;
  double base_mw = 0.0;      // g_min
  double cost_offset = 0.0;  // cost of the first base_mw of output
};

SegmentBlock add_piecewise_cost(LpProblem& p, const CostCurve& curve, double g_min, double g_max,
                                const std::string& name_prefix);

}  // namespace reserveopt
