#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "reserveopt/lp.hpp"
#include "reserveopt/requirements.hpp"
#include "reserveopt/types.hpp"

namespace reserveopt {

enum class VariantTag { A, B, C };

char to_char(VariantTag v);
VariantTag variant_from_char(char c);

/// A = equivalency-ratio requirement only; B = general requirement plus
/// rate-based limits; C = B plus the equivalency-ratio PFR limit.
struct CooptVariant {
  VariantTag tag = VariantTag::B;
  /// Linearization point b_hat for the rate-based limit in B/C; defaults
  /// to the offered FFR caps. Must lie within the caps.
  std::optional<std::vector<double>> ffr_linearization;
};

enum class FixFfrPolicy { automatic, always, never };

struct CooptOptions {
  double feas_tol = 1e-8;
  /// automatic fixes b at the offered caps when every FFR price is zero
  /// (the paper's reduction); always/never override.
  FixFfrPolicy fix_ffr = FixFfrPolicy::automatic;
  /// Re-solve at the optimal cost minimizing total R + r, so the reported
  /// reserves are the minimal ones among cost-optimal points. Reserves
  /// are zero-priced, so without this the reserve vector is arbitrary
  /// within a large optimal face.
  bool reserve_tiebreak = true;
  int slack_bus = 0;
  /// Drops the reserve requirement and PFR-limit rows entirely; used to
  /// verify that reserve constraints are non-binding at high inertia.
  bool drop_reserve_constraints = false;
};

/// DC shift-factor matrix: lines x buses, mapping balanced bus injections
/// to line flows. Throws on a disconnected network or bad slack index.
std::vector<std::vector<double>> ptdf_matrix(const Network& net, int slack_bus);

struct CooptLayout {
  std::vector<int> dispatch_var;   // G_i
  std::vector<int> nominal_var;    // R_i
  std::vector<int> available_var;  // r_i, empty for variant A
  std::vector<int> ffr_var;        // b_j
  std::vector<double> rate_limit;  // per-generator kappa*h(M, b_hat), B/C only
  double h_value = 0.0;            // h(M, 1'b_hat), B/C only
  double ratio = 1.0;              // alpha(M)
  double rfrr_mw = 0.0;            // upsilon(M)
};

struct CooptProblem {
  LpProblem lp;
  CooptLayout layout;
};

CooptProblem build_coopt_problem(const Scenario& s, const CooptVariant& v, double inertia_mws,
                                 const EquivalencyTable& table, const CooptOptions& opts = {});

inline LpProblem build_coopt(const Scenario& s, const CooptVariant& v, double inertia_mws,
                             const EquivalencyTable& table, const CooptOptions& opts = {}) {
  return build_coopt_problem(s, v, inertia_mws, table, opts).lp;
}

struct BindingConstraint {
  std::string name;
  double activity = 0.0;
  double rhs = 0.0;
  double dual = 0.0;
};

struct CooptResult {
  LpStatus status = LpStatus::infeasible;
  Allocation allocation;
  double total_cost = 0.0;
  std::vector<BindingConstraint> binding;  // binding rows; duals from the cost solve
  std::vector<double> pfr_limit;           // per generator, B/C only
  std::vector<std::string> warnings;
};

CooptResult solve_coopt(const Scenario& s, const CooptVariant& v, double inertia_mws,
                        const EquivalencyTable& table, const CooptOptions& opts = {});

/// Same dispatch problem with every reserve requirement removed.
CooptResult solve_economic_dispatch(const Scenario& s, const CooptOptions& opts = {});

struct SweepCell {
  VariantTag variant = VariantTag::A;
  double inertia_mws = 0.0;
  LpStatus status = LpStatus::infeasible;
  std::string error;  // nonempty when the cell failed outright
  double total_cost = 0.0;
  double total_nominal_mw = 0.0;
  double total_available_mw = 0.0;
  double total_ffr_mw = 0.0;
  int n_binding_pfr_limits = 0;
  std::vector<double> nominal_pfr;
  std::vector<double> available_pfr;
  std::vector<double> limits;
};

std::vector<SweepCell> sweep_inertia(const Scenario& s, const std::vector<CooptVariant>& variants,
                                     const std::vector<double>& inertia_list_mws,
                                     const EquivalencyTable& table, const CooptOptions& opts = {});

/// `variant,M_gws,total_cost,total_R_mw,total_r_mw,total_b_mw,n_binding_pfr_limits`
void write_sweep_csv(std::ostream& os, const std::vector<SweepCell>& cells);

/// `variant,M_gws,gen_id,R_mw,r_mw,limit_mw,binding`
void write_sweep_generators_csv(std::ostream& os, const Scenario& s,
                                const std::vector<SweepCell>& cells);

}  // namespace reserveopt
