#include "reserveopt/coopt.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace reserveopt {

char to_char(VariantTag v) {
  switch (v) {
    case VariantTag::A: return 'A';
    case VariantTag::B: return 'B';
    case VariantTag::C: return 'C';
  }
  return '?';
}

VariantTag variant_from_char(char c) {
  switch (c) {
    case 'A': case 'a': return VariantTag::A;
    case 'B': case 'b': return VariantTag::B;
    case 'C': case 'c': return VariantTag::C;
  }
  throw std::invalid_argument(std::string("unknown variant '") + c + "', expected A, B or C");
}

std::vector<std::vector<double>> ptdf_matrix(const Network& net, int slack_bus) {
  const int n = net.n_buses;
  if (n < 1) throw std::invalid_argument("ptdf_matrix: empty network");
  if (slack_bus < 0 || slack_bus >= n) throw std::invalid_argument("ptdf_matrix: slack bus out of range");
  for (const auto& ln : net.lines) {
    if (ln.from < 0 || ln.from >= n || ln.to < 0 || ln.to >= n || ln.from == ln.to)
      throw std::invalid_argument("ptdf_matrix: bad line endpoints");
    if (!(ln.susceptance > 0.0)) throw std::invalid_argument("ptdf_matrix: susceptance must be positive");
  }
  if (!net.connected())
    throw std::runtime_error("ptdf_matrix: network not connected (singular reduced susceptance matrix)");

  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (const auto& ln : net.lines) {
    b(ln.from, ln.from) += ln.susceptance;
    b(ln.to, ln.to) += ln.susceptance;
    b(ln.from, ln.to) -= ln.susceptance;
    b(ln.to, ln.from) -= ln.susceptance;
  }

  // invert the slack-reduced susceptance matrix and re-embed a zero
  // slack row/column; S = diag(sus) * A * X
  std::vector<int> keep;
  keep.reserve(static_cast<size_t>(n - 1));
  for (int i = 0; i < n; ++i)
    if (i != slack_bus) keep.push_back(i);
  Eigen::MatrixXd br(n - 1, n - 1);
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < n - 1; ++j) br(i, j) = b(keep[static_cast<size_t>(i)], keep[static_cast<size_t>(j)]);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(br);
  if (n > 1 && !lu.isInvertible())
    throw std::runtime_error("ptdf_matrix: singular reduced susceptance matrix");
  Eigen::MatrixXd xr = n > 1 ? lu.inverse() : Eigen::MatrixXd();

  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n - 1; ++i)
    for (int j = 0; j < n - 1; ++j) x(keep[static_cast<size_t>(i)], keep[static_cast<size_t>(j)]) = xr(i, j);

  std::vector<std::vector<double>> s(net.lines.size(), std::vector<double>(static_cast<size_t>(n), 0.0));
  for (size_t l = 0; l < net.lines.size(); ++l) {
    const auto& ln = net.lines[l];
    for (int j = 0; j < n; ++j)
      s[l][static_cast<size_t>(j)] = ln.susceptance * (x(ln.from, j) - x(ln.to, j));
  }
  return s;
}

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

bool all_ffr_free(const Scenario& s) {
  return std::all_of(s.ffr.begin(), s.ffr.end(), [](const FfrSpec& f) { return f.price == 0.0; });
}

}  // namespace

CooptProblem build_coopt_problem(const Scenario& s, const CooptVariant& v, double inertia_mws,
                                 const EquivalencyTable& table, const CooptOptions& opts) {
  if (auto viol = validate_scenario(s); !viol.empty())
    throw std::invalid_argument("build_coopt: invalid scenario: " + join(viol));
  if (!s.network)
    throw std::invalid_argument("build_coopt: scenario has no network (required by the DC constraints)");
  if (auto viol = table.validate(); !viol.empty())
    throw std::invalid_argument("build_coopt: invalid equivalency table: " + join(viol));

  const size_t n = s.generators.size();
  const size_t m = s.ffr.size();
  const double contingency = s.params.contingency_mw;

  std::vector<double> b_hat(m, 0.0);
  for (size_t j = 0; j < m; ++j) b_hat[j] = s.ffr[j].offered_ffr_cap;
  if (v.ffr_linearization) {
    if (v.ffr_linearization->size() != m)
      throw std::invalid_argument("build_coopt: b_hat size does not match the FFR resource count");
    b_hat = *v.ffr_linearization;
    for (size_t j = 0; j < m; ++j)
      if (b_hat[j] < 0.0 || b_hat[j] > s.ffr[j].offered_ffr_cap + 1e-9)
        throw std::invalid_argument("build_coopt: b_hat outside the offered FFR caps");
  }

  CooptProblem out;
  CooptLayout& lay = out.layout;
  LpProblem& lp = out.lp;

  const bool needs_r = v.tag != VariantTag::A;
  const EquivalencyParams ep = equivalency_params(inertia_mws, table);
  lay.ratio = ep.ratio;
  lay.rfrr_mw = ep.rfrr_mw;

  if (needs_r) {
    const double bhat_total = std::accumulate(b_hat.begin(), b_hat.end(), 0.0);
    if (bhat_total < contingency) {
      lay.h_value = limit_function_h(inertia_mws, bhat_total, s.params);
      lay.rate_limit.resize(n);
      for (size_t i = 0; i < n; ++i) lay.rate_limit[i] = s.generators[i].governor_ramp * lay.h_value;
    } else {
      // FFR alone covers the contingency at the linearization point; the
      // rate-based limits cannot bind
      lay.h_value = kLpInf;
      lay.rate_limit.assign(n, kLpInf);
    }
  }

  const bool fix_b = opts.fix_ffr == FixFfrPolicy::always ||
                     (opts.fix_ffr == FixFfrPolicy::automatic && all_ffr_free(s));

  for (size_t i = 0; i < n; ++i) {
    const auto& g = s.generators[i];
    lay.dispatch_var.push_back(lp.add_variable(g.g_min, g.g_max, 0.0, "G_" + g.id));
  }
  for (size_t i = 0; i < n; ++i) {
    const auto& g = s.generators[i];
    const SegmentBlock blk = add_piecewise_cost(lp, g.cost_curve, g.g_min, g.g_max, "c_" + g.id);
    lp.objective_constant += blk.cost_offset;
    if (blk.count > 0) {
      std::vector<std::pair<int, double>> link{{lay.dispatch_var[i], 1.0}};
      for (int k = 0; k < blk.count; ++k) link.emplace_back(blk.first_var + k, -1.0);
      lp.add_row(std::move(link), Relation::eq, g.g_min, "gsegs_" + g.id);
    }
  }
  for (size_t i = 0; i < n; ++i) {
    const auto& g = s.generators[i];
    lay.nominal_var.push_back(lp.add_variable(0.0, g.offered_pfr_cap, 0.0, "R_" + g.id));
  }
  if (needs_r) {
    for (size_t i = 0; i < n; ++i) {
      const auto& g = s.generators[i];
      const double cap = g.offered_pfr_cap > 0.0 ? lay.rate_limit[i] : 0.0;
      lay.available_var.push_back(lp.add_variable(0.0, cap, 0.0, "r_" + g.id));
    }
  }
  for (size_t j = 0; j < m; ++j) {
    const auto& f = s.ffr[j];
    const double lo = fix_b ? f.offered_ffr_cap : 0.0;
    lay.ffr_var.push_back(lp.add_variable(lo, f.offered_ffr_cap, f.price, "b_" + f.id));
  }

  for (size_t i = 0; i < n; ++i) {
    const auto& g = s.generators[i];
    if (g.offered_pfr_cap > 0.0)
      lp.add_row({{lay.dispatch_var[i], 1.0}, {lay.nominal_var[i], 1.0}}, Relation::le, g.g_max,
                 "headroom_" + g.id);
  }
  if (needs_r) {
    for (size_t i = 0; i < n; ++i) {
      const auto& g = s.generators[i];
      if (g.offered_pfr_cap <= 0.0) continue;
      lp.add_row({{lay.available_var[i], 1.0}, {lay.nominal_var[i], -1.0}}, Relation::le, 0.0,
                 "avail_" + g.id);
      if (v.tag == VariantTag::C)
        lp.add_row({{lay.available_var[i], 1.0}, {lay.nominal_var[i], -1.0 / ep.ratio}},
                   Relation::le, 0.0, "equiv_limit_" + g.id);
    }
  }

  if (!opts.drop_reserve_constraints) {
    if (v.tag == VariantTag::A) {
      std::vector<std::pair<int, double>> req;
      for (size_t i = 0; i < n; ++i) req.emplace_back(lay.nominal_var[i], 1.0);
      for (size_t j = 0; j < m; ++j) req.emplace_back(lay.ffr_var[j], ep.ratio);
      lp.add_row(std::move(req), Relation::ge, ep.rfrr_mw, "equivalency_requirement");
    } else {
      std::vector<std::pair<int, double>> req;
      for (size_t i = 0; i < n; ++i) req.emplace_back(lay.available_var[i], 1.0);
      for (size_t j = 0; j < m; ++j) req.emplace_back(lay.ffr_var[j], 1.0);
      lp.add_row(std::move(req), Relation::ge, contingency, "general_requirement");
    }
  }

  const Network& net = *s.network;
  const auto ptdf = ptdf_matrix(net, opts.slack_bus);
  for (size_t l = 0; l < net.lines.size(); ++l) {
    double sd = 0.0;
    for (int bus = 0; bus < net.n_buses; ++bus)
      sd += ptdf[l][static_cast<size_t>(bus)] * net.demand[static_cast<size_t>(bus)];
    std::vector<std::pair<int, double>> flow;
    for (size_t i = 0; i < n; ++i) {
      const double c = ptdf[l][static_cast<size_t>(s.generators[i].bus)];
      if (std::abs(c) > 1e-12) flow.emplace_back(lay.dispatch_var[i], c);
    }
    const double fbar = net.lines[l].flow_limit;
    lp.add_row(flow, Relation::le, fbar + sd, "flow_pos_" + std::to_string(l));
    lp.add_row(std::move(flow), Relation::ge, -fbar + sd, "flow_neg_" + std::to_string(l));
  }
  std::vector<std::pair<int, double>> bal;
  for (size_t i = 0; i < n; ++i) bal.emplace_back(lay.dispatch_var[i], 1.0);
  lp.add_row(std::move(bal), Relation::eq, net.total_demand(), "power_balance");

  return out;
}

namespace {

CooptResult solve_internal(const Scenario& s, const CooptVariant& v, double inertia_mws,
                           const EquivalencyTable& table, const CooptOptions& opts) {
  CooptProblem built = build_coopt_problem(s, v, inertia_mws, table, opts);
  const LpProblem& lp = built.lp;
  const CooptLayout& lay = built.layout;
  const size_t n = s.generators.size();
  const size_t m = s.ffr.size();

  CooptResult res;
  if (v.tag != VariantTag::A && !all_ffr_free(s)) {
    std::ostringstream os;
    os << "FFR is priced: the rate-based PFR limits are evaluated at the fixed linearization "
          "point (h = " << lay.h_value << " s) and are not re-optimized in b";
    res.warnings.push_back(os.str());
  }

  LpOptions lopts;
  lopts.feas_tol = opts.feas_tol;
  const LpSolution stage1 = solve_lp(lp, lopts);
  res.status = stage1.status;
  if (stage1.status != LpStatus::optimal) return res;

  const LpSolution* final_sol = &stage1;
  LpSolution stage2;
  LpProblem lp2;
  if (opts.reserve_tiebreak) {
    lp2 = lp;
    const double raw_cost = stage1.objective - lp.objective_constant;
    std::vector<std::pair<int, double>> cost_row;
    for (int j = 0; j < lp.n_vars(); ++j)
      if (lp.objective[static_cast<size_t>(j)] != 0.0)
        cost_row.emplace_back(j, lp.objective[static_cast<size_t>(j)]);
    lp2.add_row(std::move(cost_row), Relation::le,
                raw_cost + 1e-9 * std::max(1.0, std::abs(raw_cost)), "cost_cap");
    std::fill(lp2.objective.begin(), lp2.objective.end(), 0.0);
    for (size_t i = 0; i < n; ++i) lp2.objective[static_cast<size_t>(lay.nominal_var[i])] = 1.0;
    for (int jv : lay.available_var) lp2.objective[static_cast<size_t>(jv)] = 1.0;
    lp2.objective_constant = 0.0;
    stage2 = solve_lp(lp2, lopts);
    if (stage2.status == LpStatus::optimal)
      final_sol = &stage2;
    else
      res.warnings.push_back("reserve tie-break stage failed (" +
                             std::string(to_string(stage2.status)) + "); reporting the cost solve");
  }

  const std::vector<double>& x = final_sol->x;
  auto grab = [&](const std::vector<int>& idx) {
    std::vector<double> out(idx.size(), 0.0);
    for (size_t k = 0; k < idx.size(); ++k) out[k] = std::max(0.0, x[static_cast<size_t>(idx[k])]);
    return out;
  };
  res.allocation.dispatch.assign(n, 0.0);
  for (size_t i = 0; i < n; ++i) res.allocation.dispatch[i] = x[static_cast<size_t>(lay.dispatch_var[i])];
  res.allocation.nominal_pfr = grab(lay.nominal_var);
  res.allocation.available_pfr =
      lay.available_var.empty() ? std::vector<double>(n, 0.0) : grab(lay.available_var);
  res.allocation.ffr = grab(lay.ffr_var);
  (void)m;

  res.total_cost = lp.objective_constant;
  for (int j = 0; j < lp.n_vars(); ++j)
    res.total_cost += lp.objective[static_cast<size_t>(j)] * x[static_cast<size_t>(j)];

  // binding flags from the final point; duals from the cost solve
  for (size_t row = 0; row < lp.rows.size(); ++row) {
    const auto& r = lp.rows[row];
    double act = 0.0;
    for (const auto& [j, a] : r.coeffs) act += a * x[static_cast<size_t>(j)];
    const double tol = 1e-6 * std::max(1.0, std::abs(r.rhs));
    if (std::abs(act - r.rhs) <= tol)
      res.binding.push_back({r.name, act, r.rhs, stage1.duals[row]});
  }
  res.pfr_limit = lay.rate_limit;
  return res;
}

}  // namespace

CooptResult solve_coopt(const Scenario& s, const CooptVariant& v, double inertia_mws,
                        const EquivalencyTable& table, const CooptOptions& opts) {
  return solve_internal(s, v, inertia_mws, table, opts);
}

CooptResult solve_economic_dispatch(const Scenario& s, const CooptOptions& opts) {
  CooptOptions ed = opts;
  ed.drop_reserve_constraints = true;
  return solve_internal(s, CooptVariant{VariantTag::A, std::nullopt},
                        EquivalencyTable::builtin().rows.back().inertia_mws,
                        EquivalencyTable::builtin(), ed);
}

std::vector<SweepCell> sweep_inertia(const Scenario& s, const std::vector<CooptVariant>& variants,
                                     const std::vector<double>& inertia_list_mws,
                                     const EquivalencyTable& table, const CooptOptions& opts) {
  std::vector<SweepCell> cells;
  for (const auto& v : variants) {
    for (double inertia : inertia_list_mws) {
      SweepCell cell;
      cell.variant = v.tag;
      cell.inertia_mws = inertia;
      try {
        CooptResult r = solve_coopt(s, v, inertia, table, opts);
        cell.status = r.status;
        if (r.status == LpStatus::optimal) {
          cell.total_cost = r.total_cost;
          cell.total_nominal_mw = r.allocation.total_nominal_pfr();
          cell.total_available_mw = r.allocation.total_available_pfr();
          cell.total_ffr_mw = r.allocation.total_ffr();
          cell.nominal_pfr = r.allocation.nominal_pfr;
          cell.available_pfr = r.allocation.available_pfr;
          cell.limits = r.pfr_limit;
          for (size_t i = 0; i < cell.available_pfr.size(); ++i) {
            if (v.tag == VariantTag::A || cell.limits.empty()) break;
            const double lim = cell.limits[i];
            if (std::isfinite(lim) && lim > 0.0 && cell.available_pfr[i] > 1e-6 &&
                std::abs(cell.available_pfr[i] - lim) <= 1e-6 * std::max(1.0, lim))
              ++cell.n_binding_pfr_limits;
          }
        } else {
          cell.error = to_string(r.status);
        }
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

namespace {

std::string fmt(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace

void write_sweep_csv(std::ostream& os, const std::vector<SweepCell>& cells) {
  os << "variant,M_gws,total_cost,total_R_mw,total_r_mw,total_b_mw,n_binding_pfr_limits\n";
  for (const auto& c : cells) {
    os << to_char(c.variant) << "," << fmt(c.inertia_mws / 1000.0) << ",";
    if (c.status == LpStatus::optimal && c.error.empty()) {
      os << fmt(c.total_cost) << "," << fmt(c.total_nominal_mw) << "," << fmt(c.total_available_mw)
         << "," << fmt(c.total_ffr_mw) << "," << c.n_binding_pfr_limits;
    } else {
      os << ",,,,";  // failed cell: values left empty
    }
    os << "\n";
  }
}

void write_sweep_generators_csv(std::ostream& os, const Scenario& s,
                                const std::vector<SweepCell>& cells) {
  os << "variant,M_gws,gen_id,R_mw,r_mw,limit_mw,binding\n";
  for (const auto& c : cells) {
    if (c.status != LpStatus::optimal || !c.error.empty()) continue;
    for (size_t i = 0; i < s.generators.size(); ++i) {
      if (s.generators[i].offered_pfr_cap <= 0.0) continue;
      os << to_char(c.variant) << "," << fmt(c.inertia_mws / 1000.0) << "," << s.generators[i].id
         << "," << fmt(i < c.nominal_pfr.size() ? c.nominal_pfr[i] : 0.0) << ",";
      if (c.variant == VariantTag::A) {
        os << "0,,0\n";
        continue;
      }
      const double r = i < c.available_pfr.size() ? c.available_pfr[i] : 0.0;
      const double lim = i < c.limits.size() ? c.limits[i] : 0.0;
      const bool binding = std::isfinite(lim) && lim > 0.0 && r > 1e-6 &&
                           std::abs(r - lim) <= 1e-6 * std::max(1.0, lim);
      os << fmt(r) << "," << (std::isfinite(lim) ? fmt(lim) : "inf") << "," << (binding ? 1 : 0)
         << "\n";
    }
  }
}

}  // namespace reserveopt
