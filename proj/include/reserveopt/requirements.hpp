#pragma once

#include <vector>

#include "reserveopt/types.hpp"

namespace reserveopt {

/// Droop constant gamma = G_bar / (nu*omega0 - delta1), MW/Hz.
/// Throws std::domain_error when nu*omega0 <= delta1.
double droop_constant(const GeneratorSpec& g, const SystemParams& p);

enum class CapMode { exact, approx };

/// Offered-PFR capacity limit. `exact` evaluates
/// G_bar*(omega0 - omega_min - delta1)/(nu*omega0 - delta1); `approx`
/// drops the dead-band, G_bar*(omega0 - omega_min)/(nu*omega0), which is
/// the rule used in practice (0.2*G_bar at 5% droop, 60->59.4 Hz).
double offered_pfr_cap_limit(const GeneratorSpec& g, const SystemParams& p, CapMode mode);

/// Minimum post-outage inertia for the FFR-after-ramp-start assumption:
/// epsilon*L*omega0 / (2*delta2), MW*s.
double min_inertia_for_assumption(const SystemParams& p);

/// Assumption check used before evaluating the limit function.
bool assumption_holds(double inertia_mws, const SystemParams& p);

/// The limit function h(M, b_tilde) in seconds: the ramping window a
/// governor has to deliver PFR before the frequency nadir, given total
/// FFR b_tilde deployed at the omega2 crossing.
///
/// Domain: inertia >= min_inertia_for_assumption and 0 <= b_tilde < L
/// (h diverges as b_tilde -> L; callers must branch when FFR alone
/// covers the contingency). Violations throw std::domain_error.
double limit_function_h(double inertia_mws, double total_ffr_mw, const SystemParams& p);

/// Rate-based available-PFR limit: kappa * h(M, b_tilde), MW.
double rate_based_limit(const GeneratorSpec& g, double inertia_mws, double total_ffr_mw,
                        const SystemParams& p);

/// Proportional available-PFR limit: lambda * R * h(M, b_tilde), MW.
double proportional_limit(const GeneratorSpec& g, double nominal_pfr_mw, double inertia_mws,
                          double total_ffr_mw, const SystemParams& p);

/// One row of the empirical equivalency-ratio dataset.
struct EquivalencyRow {
  double inertia_mws = 0.0;  // M
  double rfrr_mw = 0.0;      // requirement quantity upsilon(M)
  double ratio = 0.0;        // equivalency ratio alpha(M), >= 1

  bool operator==(const EquivalencyRow&) const = default;
};

struct EquivalencyTable {
  std::vector<EquivalencyRow> rows;  // sorted by inertia, strictly increasing

  /// The nine published rows (120..297 GW*s).
  static EquivalencyTable builtin();

  std::vector<std::string> validate() const;

  bool operator==(const EquivalencyTable&) const = default;
};

struct EquivalencyParams {
  double ratio = 1.0;   // alpha(M)
  double rfrr_mw = 0.0; // upsilon(M)
};

/// alpha(M) and upsilon(M): exact at tabulated inertias, linear in M
/// between rows, clamped to the end rows outside the tabulated range.
EquivalencyParams equivalency_params(double inertia_mws, const EquivalencyTable& t);

/// Equivalency-ratio available-PFR limit: R / alpha, MW.
double equivalency_ratio_limit(double ratio, double nominal_pfr_mw);

struct RequirementCheck {
  bool satisfied = false;
  double slack_mw = 0.0;  // lhs - rhs, signed
};

/// General requirement: sum(r) + sum(b) >= L.
RequirementCheck check_general_requirement(const Allocation& a, double contingency_mw);

/// Equivalency-ratio requirement: sum(R) + alpha(M)*sum(b) >= upsilon(M).
RequirementCheck check_equivalency_requirement(const std::vector<double>& nominal_pfr,
                                               const std::vector<double>& ffr, double inertia_mws,
                                               const EquivalencyTable& t);

/// Reformulated requirement: (1/alpha)*sum(R) + sum(b) >= L.
RequirementCheck check_reformulated_requirement(const std::vector<double>& nominal_pfr,
                                                const std::vector<double>& ffr, double ratio,
                                                double contingency_mw);

/// First-principles equivalency-ratio approximation 1/(lambda*h(M, b_tilde)).
double approx_equivalency_ratio(double lambda_common, double inertia_mws, double total_ffr_mw,
                                const SystemParams& p);

enum class LimitKind { rate_based, proportional, equivalency };

struct LimitEntry {
  std::string generator_id;
  double limit_mw = 0.0;
  bool binding = false;
  LimitKind kind = LimitKind::rate_based;
};

using LimitReport = std::vector<LimitEntry>;

}  // namespace reserveopt
