#include "reserveopt/lp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace reserveopt {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

int LpProblem::add_variable(double lo, double up, double cost, std::string name) {
  lower.push_back(lo);
  upper.push_back(up);
  objective.push_back(cost);
  var_names.push_back(name.empty() ? "x" + std::to_string(objective.size() - 1) : std::move(name));
  return n_vars() - 1;
}

void LpProblem::add_row(std::vector<std::pair<int, double>> coeffs, Relation rel, double rhs,
                        std::string name) {
  LpConstraint c;
  c.coeffs = std::move(coeffs);
  c.rel = rel;
  c.rhs = rhs;
  c.name = name.empty() ? "row" + std::to_string(rows.size()) : std::move(name);
  rows.push_back(std::move(c));
}

std::vector<std::string> LpProblem::validate() const {
  std::vector<std::string> out;
  for (int j = 0; j < n_vars(); ++j) {
    if (!(lower[j] <= upper[j]))
      out.push_back("variable " + var_names[j] + ": lower > upper");
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || std::isnan(objective[j]))
      out.push_back("variable " + var_names[j] + ": NaN bound or cost");
  }
  for (const auto& r : rows) {
    if (!std::isfinite(r.rhs)) out.push_back("row " + r.name + ": rhs not finite");
    for (const auto& [j, a] : r.coeffs) {
      if (j < 0 || j >= n_vars()) out.push_back("row " + r.name + ": variable index out of range");
      if (!std::isfinite(a)) out.push_back("row " + r.name + ": non-finite coefficient");
    }
  }
  return out;
}

double LpSolution::row_activity(const LpProblem& p, int row) const {
  double act = 0.0;
  for (const auto& [j, a] : p.rows[static_cast<size_t>(row)].coeffs)
    act += a * x[static_cast<size_t>(j)];
  return act;
}

namespace {

enum class NbState { at_lower, at_upper, free_at_zero };

struct Tableau {
  int m = 0, ncols = 0;
  std::vector<double> t;  // row-major m x ncols
  double* row(int i) { return t.data() + static_cast<size_t>(i) * static_cast<size_t>(ncols); }
  const double* row(int i) const {
    return t.data() + static_cast<size_t>(i) * static_cast<size_t>(ncols);
  }
};

constexpr double kPivotTol = 1e-9;
constexpr double kDegenStep = 1e-11;

struct Simplex {
  const LpOptions& opts;
  int n_struct, m, n_total;
  int slack_base, art_base;
  std::vector<double> lo, up;     // per column
  std::vector<NbState> nb;
  std::vector<char> is_basic;
  std::vector<int> basis;         // per row: basic column
  std::vector<double> beta;       // per row: basic variable value
  Tableau tab;
  std::vector<double> d;          // reduced costs for the active cost vector
  int iterations = 0;
  int degen_streak = 0;

  explicit Simplex(const LpOptions& o) : opts(o) {}

  double nb_value(int j) const {
    switch (nb[static_cast<size_t>(j)]) {
      case NbState::at_lower: return lo[static_cast<size_t>(j)];
      case NbState::at_upper: return up[static_cast<size_t>(j)];
      case NbState::free_at_zero: return 0.0;
    }
    return 0.0;
  }

  void compute_reduced_costs(const std::vector<double>& cost) {
    d = cost;
    for (int i = 0; i < m; ++i) {
      const double cb = cost[static_cast<size_t>(basis[static_cast<size_t>(i)])];
      if (cb == 0.0) continue;
      const double* ti = tab.row(i);
      for (int j = 0; j < n_total; ++j) d[static_cast<size_t>(j)] -= cb * ti[j];
    }
  }

  // One simplex phase over the given cost vector. Returns the status.
  LpStatus iterate(const std::vector<double>& cost) {
    compute_reduced_costs(cost);
    double cost_scale = 1.0;
    for (double c : cost) cost_scale = std::max(cost_scale, std::abs(c));
    const double ptol = opts.opt_tol * cost_scale;

    while (true) {
      if (iterations >= opts.max_iterations) return LpStatus::iteration_limit;
      const bool bland = degen_streak >= opts.bland_after_degenerate;

      int q = -1;
      int dir = +1;
      double best = ptol;
      for (int j = 0; j < n_total; ++j) {
        if (is_basic[static_cast<size_t>(j)]) continue;
        if (lo[static_cast<size_t>(j)] == up[static_cast<size_t>(j)]) continue;  // fixed
        const double dj = d[static_cast<size_t>(j)];
        int cand_dir = 0;
        switch (nb[static_cast<size_t>(j)]) {
          case NbState::at_lower:
            if (dj < -best) cand_dir = +1;
            break;
          case NbState::at_upper:
            if (dj > best) cand_dir = -1;
            break;
          case NbState::free_at_zero:
            if (std::abs(dj) > best) cand_dir = dj < 0.0 ? +1 : -1;
            break;
        }
        if (cand_dir != 0) {
          q = j;
          dir = cand_dir;
          if (bland) break;     // first eligible index
          best = std::abs(dj);  // Dantzig: most violating, lowest index on ties
        }
      }
      if (q < 0) return LpStatus::optimal;

      // ratio test: entering moves by step >= 0 in direction dir
      double step = kLpInf;
      if (std::isfinite(lo[static_cast<size_t>(q)]) && std::isfinite(up[static_cast<size_t>(q)]))
        step = up[static_cast<size_t>(q)] - lo[static_cast<size_t>(q)];
      int leave = -1;
      bool leave_to_upper = false;
      double leave_alpha = 0.0;
      auto consider = [&](int i, double ti, double alpha, bool to_upper) {
        ti = std::max(ti, 0.0);
        bool take = false;
        if (ti < step - 1e-12) {
          take = true;
        } else if (ti < step + 1e-12) {
          if (leave < 0)
            take = true;
          else if (bland)
            take = basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leave)];
          else
            take = alpha > leave_alpha * (1.0 + 1e-12);  // prefer the stabler pivot
        }
        if (take) {
          step = std::min(step, ti);
          leave = i;
          leave_alpha = alpha;
          leave_to_upper = to_upper;
        }
      };
      for (int i = 0; i < m; ++i) {
        const double alpha = dir * tab.row(i)[q];
        if (alpha > kPivotTol) {
          const double lb = lo[static_cast<size_t>(basis[static_cast<size_t>(i)])];
          if (!std::isfinite(lb)) continue;
          consider(i, (beta[static_cast<size_t>(i)] - lb) / alpha, alpha, false);
        } else if (alpha < -kPivotTol) {
          const double ub = up[static_cast<size_t>(basis[static_cast<size_t>(i)])];
          if (!std::isfinite(ub)) continue;
          consider(i, (ub - beta[static_cast<size_t>(i)]) / (-alpha), -alpha, true);
        }
      }

      if (!std::isfinite(step)) return LpStatus::unbounded;
      ++iterations;
      degen_streak = step <= kDegenStep ? degen_streak + 1 : 0;

      if (leave < 0) {
        // bound flip: entering runs to its opposite bound
        for (int i = 0; i < m; ++i)
          beta[static_cast<size_t>(i)] -= dir * step * tab.row(i)[q];
        nb[static_cast<size_t>(q)] =
            nb[static_cast<size_t>(q)] == NbState::at_lower ? NbState::at_upper : NbState::at_lower;
        continue;
      }

      pivot(q, dir, step, leave, leave_to_upper);
    }
  }

  void pivot(int q, int dir, double step, int r, bool leave_to_upper) {
    const int lv = basis[static_cast<size_t>(r)];
    const double enter_val = (nb[static_cast<size_t>(q)] == NbState::free_at_zero
                                  ? 0.0
                                  : nb_value(q)) +
                             dir * step;
    for (int i = 0; i < m; ++i) {
      if (i == r) continue;
      beta[static_cast<size_t>(i)] -= dir * step * tab.row(i)[q];
    }

    const double piv = tab.row(r)[q];
    double* tr = tab.row(r);
    const double inv = 1.0 / piv;
    for (int j = 0; j < n_total; ++j) tr[j] *= inv;
    for (int i = 0; i < m; ++i) {
      if (i == r) continue;
      double* ti = tab.row(i);
      const double f = ti[q];
      if (f == 0.0) continue;
      for (int j = 0; j < n_total; ++j) ti[j] -= f * tr[j];
      ti[q] = 0.0;  // keep the unit column exact
    }
    const double fd = d[static_cast<size_t>(q)];
    if (fd != 0.0) {
      for (int j = 0; j < n_total; ++j) d[static_cast<size_t>(j)] -= fd * tr[j];
      d[static_cast<size_t>(q)] = 0.0;
    }

    is_basic[static_cast<size_t>(q)] = 1;
    is_basic[static_cast<size_t>(lv)] = 0;
    nb[static_cast<size_t>(lv)] = leave_to_upper ? NbState::at_upper : NbState::at_lower;
    if (!std::isfinite(leave_to_upper ? up[static_cast<size_t>(lv)] : lo[static_cast<size_t>(lv)]))
      nb[static_cast<size_t>(lv)] = NbState::free_at_zero;  // defensive; unreachable by ratio test
    basis[static_cast<size_t>(r)] = q;
    beta[static_cast<size_t>(r)] = enter_val;
  }
};

}  // namespace

LpSolution solve_lp(const LpProblem& p, const LpOptions& opts) {
  if (auto v = p.validate(); !v.empty())
    throw std::invalid_argument("solve_lp: invalid problem: " + v.front());

  const int n = p.n_vars();
  const int m = static_cast<int>(p.rows.size());

  Simplex sx(opts);
  sx.n_struct = n;
  sx.m = m;
  int n_slack = 0;
  for (const auto& r : p.rows)
    if (r.rel != Relation::eq) ++n_slack;
  sx.slack_base = n;
  sx.art_base = n + n_slack;
  sx.n_total = n + n_slack + m;

  sx.lo.assign(static_cast<size_t>(sx.n_total), 0.0);
  sx.up.assign(static_cast<size_t>(sx.n_total), 0.0);
  for (int j = 0; j < n; ++j) {
    sx.lo[static_cast<size_t>(j)] = p.lower[static_cast<size_t>(j)];
    sx.up[static_cast<size_t>(j)] = p.upper[static_cast<size_t>(j)];
  }

  sx.tab.m = m;
  sx.tab.ncols = sx.n_total;
  sx.tab.t.assign(static_cast<size_t>(m) * static_cast<size_t>(sx.n_total), 0.0);

  // rows as equalities: <= gets a slack in [0, inf), >= a surplus in (-inf, 0]
  int slack_idx = sx.slack_base;
  std::vector<int> row_slack(static_cast<size_t>(m), -1);
  for (int i = 0; i < m; ++i) {
    const auto& r = p.rows[static_cast<size_t>(i)];
    for (const auto& [j, a] : r.coeffs) sx.tab.row(i)[j] += a;
    if (r.rel != Relation::eq) {
      sx.tab.row(i)[slack_idx] = 1.0;
      if (r.rel == Relation::le) {
        sx.lo[static_cast<size_t>(slack_idx)] = 0.0;
        sx.up[static_cast<size_t>(slack_idx)] = kLpInf;
      } else {
        sx.lo[static_cast<size_t>(slack_idx)] = -kLpInf;
        sx.up[static_cast<size_t>(slack_idx)] = 0.0;
      }
      row_slack[static_cast<size_t>(i)] = slack_idx;
      ++slack_idx;
    }
  }

  // nonbasic start: finite bound nearest zero, else free at zero
  sx.nb.assign(static_cast<size_t>(sx.n_total), NbState::at_lower);
  sx.is_basic.assign(static_cast<size_t>(sx.n_total), 0);
  for (int j = 0; j < sx.art_base; ++j) {
    const double l = sx.lo[static_cast<size_t>(j)], u = sx.up[static_cast<size_t>(j)];
    if (std::isfinite(l) && std::isfinite(u))
      sx.nb[static_cast<size_t>(j)] = std::abs(l) <= std::abs(u) ? NbState::at_lower : NbState::at_upper;
    else if (std::isfinite(l))
      sx.nb[static_cast<size_t>(j)] = NbState::at_lower;
    else if (std::isfinite(u))
      sx.nb[static_cast<size_t>(j)] = NbState::at_upper;
    else
      sx.nb[static_cast<size_t>(j)] = NbState::free_at_zero;
  }

  // artificial basis carrying the residuals
  sx.basis.assign(static_cast<size_t>(m), -1);
  sx.beta.assign(static_cast<size_t>(m), 0.0);
  std::vector<double> row_sign(static_cast<size_t>(m), 1.0);
  double rhs_scale = 1.0;
  for (int i = 0; i < m; ++i) {
    const auto& r = p.rows[static_cast<size_t>(i)];
    rhs_scale = std::max(rhs_scale, std::abs(r.rhs));
    double act = 0.0;
    for (int j = 0; j < sx.art_base; ++j) {
      const double a = sx.tab.row(i)[j];
      if (a != 0.0) act += a * sx.nb_value(j);
    }
    const double resid = r.rhs - act;
    const int art = sx.art_base + i;
    sx.lo[static_cast<size_t>(art)] = 0.0;
    sx.up[static_cast<size_t>(art)] = kLpInf;
    sx.basis[static_cast<size_t>(i)] = art;
    sx.is_basic[static_cast<size_t>(art)] = 1;
    sx.beta[static_cast<size_t>(i)] = std::abs(resid);
    if (resid < 0.0) {
      // flip the row so the artificial can carry a nonnegative residual
      row_sign[static_cast<size_t>(i)] = -1.0;
      double* ti = sx.tab.row(i);
      for (int j = 0; j < sx.n_total; ++j) ti[j] = -ti[j];
    }
    sx.tab.row(i)[art] = 1.0;
  }

  LpSolution sol;

  // phase 1: drive the artificial residuals to zero
  std::vector<double> cost1(static_cast<size_t>(sx.n_total), 0.0);
  for (int i = 0; i < m; ++i) cost1[static_cast<size_t>(sx.art_base + i)] = 1.0;
  LpStatus st = sx.iterate(cost1);
  if (st == LpStatus::iteration_limit) {
    sol.status = st;
    sol.iterations = sx.iterations;
    return sol;
  }
  double infeas = 0.0;
  for (int i = 0; i < m; ++i)
    if (sx.basis[static_cast<size_t>(i)] >= sx.art_base) infeas += sx.beta[static_cast<size_t>(i)];
  if (infeas > opts.feas_tol * rhs_scale) {
    sol.status = LpStatus::infeasible;
    sol.iterations = sx.iterations;
    return sol;
  }

  // pivot remaining zero-valued artificials out where possible
  for (int i = 0; i < m; ++i) {
    if (sx.basis[static_cast<size_t>(i)] < sx.art_base) continue;
    int q = -1;
    for (int j = 0; j < sx.art_base; ++j) {
      if (sx.is_basic[static_cast<size_t>(j)]) continue;
      if (sx.lo[static_cast<size_t>(j)] == sx.up[static_cast<size_t>(j)]) continue;
      if (std::abs(sx.tab.row(i)[j]) > 1e-7) {
        q = j;
        break;
      }
    }
    if (q >= 0) {
      sx.d.assign(static_cast<size_t>(sx.n_total), 0.0);  // rebuilt at phase 2 entry
      sx.pivot(q, +1, 0.0, i, false);
    }
  }
  // freeze artificials at zero so they can never re-enter
  for (int i = 0; i < m; ++i) {
    const int art = sx.art_base + i;
    sx.lo[static_cast<size_t>(art)] = 0.0;
    sx.up[static_cast<size_t>(art)] = 0.0;
    if (!sx.is_basic[static_cast<size_t>(art)]) sx.nb[static_cast<size_t>(art)] = NbState::at_lower;
  }

  // phase 2
  std::vector<double> cost2(static_cast<size_t>(sx.n_total), 0.0);
  for (int j = 0; j < n; ++j) cost2[static_cast<size_t>(j)] = p.objective[static_cast<size_t>(j)];
  sx.degen_streak = 0;
  st = sx.iterate(cost2);
  if (st == LpStatus::iteration_limit || st == LpStatus::unbounded) {
    sol.status = st;
    sol.iterations = sx.iterations;
    return sol;
  }

  sol.status = LpStatus::optimal;
  sol.iterations = sx.iterations;
  sol.x.assign(static_cast<size_t>(n), 0.0);
  for (int j = 0; j < n; ++j)
    if (!sx.is_basic[static_cast<size_t>(j)]) sol.x[static_cast<size_t>(j)] = sx.nb_value(j);
  for (int i = 0; i < m; ++i) {
    const int bj = sx.basis[static_cast<size_t>(i)];
    if (bj < n) sol.x[static_cast<size_t>(bj)] = sx.beta[static_cast<size_t>(i)];
  }
  // clip round-off outside the box
  for (int j = 0; j < n; ++j) {
    sol.x[static_cast<size_t>(j)] = std::min(std::max(sol.x[static_cast<size_t>(j)],
                                                      p.lower[static_cast<size_t>(j)]),
                                             p.upper[static_cast<size_t>(j)]);
  }
  sol.objective = p.objective_constant;
  for (int j = 0; j < n; ++j)
    sol.objective += p.objective[static_cast<size_t>(j)] * sol.x[static_cast<size_t>(j)];

  // duals: the slack column of row i has coefficient +1 there and cost 0,
  // so d[slack] = -y_i regardless of a phase-1 row flip (the flip negates
  // both the slack coefficient and the flipped-frame dual). Equality rows
  // fall back to the artificial column, whose post-flip coefficient is +1
  // in the flipped frame, so the original dual is -row_sign * d[art].
  sol.duals.assign(static_cast<size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) {
    const int sl = row_slack[static_cast<size_t>(i)];
    if (sl >= 0)
      sol.duals[static_cast<size_t>(i)] = -sx.d[static_cast<size_t>(sl)];
    else
      sol.duals[static_cast<size_t>(i)] =
          -row_sign[static_cast<size_t>(i)] * sx.d[static_cast<size_t>(sx.art_base + i)];
  }
  sol.reduced_costs.assign(static_cast<size_t>(n), 0.0);
  for (int j = 0; j < n; ++j)
    sol.reduced_costs[static_cast<size_t>(j)] =
        sx.is_basic[static_cast<size_t>(j)] ? 0.0 : sx.d[static_cast<size_t>(j)];

  sol.binding.assign(static_cast<size_t>(m), false);
  for (int i = 0; i < m; ++i) {
    const auto& r = p.rows[static_cast<size_t>(i)];
    const double act = sol.row_activity(p, i);
    const double tol = opts.feas_tol * std::max(1.0, std::abs(r.rhs)) * 10.0;
    sol.binding[static_cast<size_t>(i)] = std::abs(act - r.rhs) <= tol;
  }
  return sol;
}

void dump_lp(std::ostream& os, const LpProblem& p) {
  os << "min:";
  for (int j = 0; j < p.n_vars(); ++j) {
    if (p.objective[static_cast<size_t>(j)] == 0.0) continue;
    os << " " << (p.objective[static_cast<size_t>(j)] >= 0 ? "+" : "") << p.objective[static_cast<size_t>(j)]
       << " " << p.var_names[static_cast<size_t>(j)];
  }
  if (p.objective_constant != 0.0) os << " + " << p.objective_constant;
  os << "\n";
  for (const auto& r : p.rows) {
    os << r.name << ":";
    for (const auto& [j, a] : r.coeffs)
      os << " " << (a >= 0 ? "+" : "") << a << " " << p.var_names[static_cast<size_t>(j)];
    switch (r.rel) {
      case Relation::le: os << " <= "; break;
      case Relation::eq: os << " = "; break;
      case Relation::ge: os << " >= "; break;
    }
    os << r.rhs << "\n";
  }
  for (int j = 0; j < p.n_vars(); ++j)
    os << "bound: " << p.lower[static_cast<size_t>(j)] << " <= " << p.var_names[static_cast<size_t>(j)]
       << " <= " << p.upper[static_cast<size_t>(j)] << "\n";
}

SegmentBlock add_piecewise_cost(LpProblem& p, const CostCurve& curve, double g_min, double g_max,
                                const std::string& name_prefix) {
  if (g_min > g_max) throw std::invalid_argument("add_piecewise_cost: g_min > g_max");
  for (size_t k = 1; k < curve.size(); ++k) {
    if (curve[k].price < curve[k - 1].price)
      throw std::invalid_argument("add_piecewise_cost: cost_curve not convex (marginal prices "
                                  "decrease at segment " + std::to_string(k) + ")");
    if (curve[k].up_to_mw <= curve[k - 1].up_to_mw)
      throw std::invalid_argument("add_piecewise_cost: breakpoints not strictly increasing");
  }

  SegmentBlock block;
  block.base_mw = g_min;
  block.cost_offset = cost_at(curve, g_min);
  block.first_var = p.n_vars();

  if (g_max <= g_min) return block;  // fixed output, no segment variables

  if (curve.empty()) {
    p.add_variable(0.0, g_max - g_min, 0.0, name_prefix + "_s0");
    block.count = 1;
    return block;
  }

  double from = g_min;
  int k = 0;
  for (const auto& seg : curve) {
    if (seg.up_to_mw <= from) continue;
    const double to = std::min(seg.up_to_mw, g_max);
    if (to > from) {
      p.add_variable(0.0, to - from, seg.price, name_prefix + "_s" + std::to_string(k++));
      from = to;
    }
    if (from >= g_max) break;
  }
  if (from < g_max)  // extend the last marginal price beyond the final breakpoint
    p.add_variable(0.0, g_max - from, curve.back().price, name_prefix + "_s" + std::to_string(k++));
  block.count = k;
  return block;
}

}  // namespace reserveopt
