#include "reserveopt/requirements.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace reserveopt {

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

[[noreturn]] void domain_fail(const std::string& msg) { throw std::domain_error(msg); }

}  // namespace

double droop_constant(const GeneratorSpec& g, const SystemParams& p) {
  const double d1 = derived_deltas(p).d1;
  const double denom = g.droop_fraction * p.omega0 - d1;
  if (denom <= 0.0) {
    std::ostringstream os;
    os << "droop_constant: nu*omega0 must exceed the dead-band delta1 (nu*omega0="
       << g.droop_fraction * p.omega0 << " Hz, delta1=" << d1 << " Hz)";
    domain_fail(os.str());
  }
  return g.g_max / denom;
}

double offered_pfr_cap_limit(const GeneratorSpec& g, const SystemParams& p, CapMode mode) {
  const double d1 = derived_deltas(p).d1;
  const double span = p.omega0 - p.omega_min;
  if (mode == CapMode::approx) return g.g_max * span / (g.droop_fraction * p.omega0);
  const double denom = g.droop_fraction * p.omega0 - d1;
  if (denom <= 0.0)
    domain_fail("offered_pfr_cap_limit: nu*omega0 must exceed the dead-band delta1");
  return g.g_max * (span - d1) / denom;
}

double min_inertia_for_assumption(const SystemParams& p) {
  const double d2 = derived_deltas(p).d2;
  if (d2 <= 0.0) domain_fail("min_inertia_for_assumption: delta2 must be positive");
  return p.epsilon * p.contingency_mw * p.omega0 / (2.0 * d2);
}

bool assumption_holds(double inertia_mws, const SystemParams& p) {
  // tiny relative slack so the exact boundary value passes through fp noise
  return inertia_mws >= min_inertia_for_assumption(p) * (1.0 - 1e-12);
}

double limit_function_h(double inertia_mws, double total_ffr_mw, const SystemParams& p) {
  const Deltas d = derived_deltas(p);
  const double L = p.contingency_mw;
  if (total_ffr_mw < 0.0) domain_fail("limit_function_h: b_tilde must be nonnegative");
  if (total_ffr_mw >= L) {
    std::ostringstream os;
    os << "limit_function_h: b_tilde (" << total_ffr_mw << " MW) must be below the contingency L ("
       << L << " MW); with that much FFR the PFR limits are not binding and h diverges";
    domain_fail(os.str());
  }
  if (!assumption_holds(inertia_mws, p)) {
    std::ostringstream os;
    os << "limit_function_h: inertia " << inertia_mws
       << " MW*s violates the FFR-after-ramp-start assumption; the bound epsilon*L*omega0/(2*delta2) is "
       << min_inertia_for_assumption(p) << " MW*s";
    domain_fail(os.str());
  }

  const double a = p.omega0 * p.epsilon * L / (2.0 * inertia_mws);
  const double c1 = d.d2 + d.d3 - a;  // >= d.d3 > 0 on the assumption domain
  const double c2 = d.d2 - a;         // >= 0 on the assumption domain
  const double b = total_ffr_mw;
  const double root_arg = c1 * L * L - c2 * b * b;  // >= d3*L^2 > 0 here
  const double u = b * std::sqrt(d.d3);
  const double v = std::sqrt(root_arg);
  const double scale = 4.0 * inertia_mws / p.omega0;

  // Near b ~ L the printed form divides (u - v)^2 into a vanishing
  // numerator (0/0); switch to the rationalized equivalent
  // scale*(u+v)^2 / ((L-b)(L+b)^2) once u and v nearly cancel.
  if (std::abs(u - v) < 1e-6 * L * std::sqrt(d.d3)) {
    const double t = u + v;
    return scale * t * t / ((L - b) * (L + b) * (L + b));
  }
  const double den = (u - v) * (u - v);
  return scale * c1 * c1 * (L - b) / den;
}

double rate_based_limit(const GeneratorSpec& g, double inertia_mws, double total_ffr_mw,
                        const SystemParams& p) {
  return g.governor_ramp * limit_function_h(inertia_mws, total_ffr_mw, p);
}

double proportional_limit(const GeneratorSpec& g, double nominal_pfr_mw, double inertia_mws,
                          double total_ffr_mw, const SystemParams& p) {
  if (nominal_pfr_mw < 0.0) domain_fail("proportional_limit: nominal PFR must be nonnegative");
  return g.ramp_proportionality * nominal_pfr_mw * limit_function_h(inertia_mws, total_ffr_mw, p);
}

EquivalencyTable EquivalencyTable::builtin() {
  // Inertia in MW*s, requirement quantity in MW, ratio dimensionless.
  return EquivalencyTable{{
      {120000.0, 5200.0, 2.2},
      {136000.0, 4700.0, 2.0},
      {152000.0, 3750.0, 1.5},
      {177000.0, 3370.0, 1.4},
      {202000.0, 3100.0, 1.3},
      {230000.0, 3040.0, 1.25},
      {256000.0, 2640.0, 1.13},
      {278000.0, 2640.0, 1.08},
      {297000.0, 2240.0, 1.0},
  }};
}

std::vector<std::string> EquivalencyTable::validate() const {
  std::vector<std::string> out;
  if (rows.empty()) out.push_back("equivalency_table: no rows");
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].ratio < 1.0)
      out.push_back("equivalency_table row " + std::to_string(i) + ": ratio >= 1 violated");
    if (rows[i].rfrr_mw <= 0.0)
      out.push_back("equivalency_table row " + std::to_string(i) + ": rfrr > 0 violated");
    if (i > 0 && rows[i].inertia_mws <= rows[i - 1].inertia_mws)
      out.push_back("equivalency_table row " + std::to_string(i) +
                    ": inertia not strictly increasing");
  }
  return out;
}

EquivalencyParams equivalency_params(double inertia_mws, const EquivalencyTable& t) {
  if (t.rows.empty()) domain_fail("equivalency_params: table is empty");
  const auto& rows = t.rows;
  if (inertia_mws <= rows.front().inertia_mws)
    return {rows.front().ratio, rows.front().rfrr_mw};
  if (inertia_mws >= rows.back().inertia_mws)
    return {rows.back().ratio, rows.back().rfrr_mw};
  auto hi = std::upper_bound(rows.begin(), rows.end(), inertia_mws,
                             [](double m, const EquivalencyRow& r) { return m < r.inertia_mws; });
  const auto& b = *hi;
  const auto& a = *(hi - 1);
  const double w = (inertia_mws - a.inertia_mws) / (b.inertia_mws - a.inertia_mws);
  return {a.ratio + w * (b.ratio - a.ratio), a.rfrr_mw + w * (b.rfrr_mw - a.rfrr_mw)};
}

double equivalency_ratio_limit(double ratio, double nominal_pfr_mw) {
  if (ratio < 1.0) domain_fail("equivalency_ratio_limit: ratio >= 1 required");
  return nominal_pfr_mw / ratio;
}

RequirementCheck check_general_requirement(const Allocation& a, double contingency_mw) {
  const double lhs = a.total_available_pfr() + a.total_ffr();
  return {lhs >= contingency_mw, lhs - contingency_mw};
}

RequirementCheck check_equivalency_requirement(const std::vector<double>& nominal_pfr,
                                               const std::vector<double>& ffr, double inertia_mws,
                                               const EquivalencyTable& t) {
  const EquivalencyParams ep = equivalency_params(inertia_mws, t);
  const double lhs = sum(nominal_pfr) + ep.ratio * sum(ffr);
  return {lhs >= ep.rfrr_mw, lhs - ep.rfrr_mw};
}

RequirementCheck check_reformulated_requirement(const std::vector<double>& nominal_pfr,
                                                const std::vector<double>& ffr, double ratio,
                                                double contingency_mw) {
  if (ratio < 1.0) domain_fail("check_reformulated_requirement: ratio >= 1 required");
  const double lhs = sum(nominal_pfr) / ratio + sum(ffr);
  return {lhs >= contingency_mw, lhs - contingency_mw};
}

double approx_equivalency_ratio(double lambda_common, double inertia_mws, double total_ffr_mw,
                                const SystemParams& p) {
  if (lambda_common <= 0.0) domain_fail("approx_equivalency_ratio: lambda must be positive");
  return 1.0 / (lambda_common * limit_function_h(inertia_mws, total_ffr_mw, p));
}

}  // namespace reserveopt
