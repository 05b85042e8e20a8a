#pragma once

#include <optional>
#include <string>
#include <vector>

// Units used throughout the library: power in MW, inertia in MW*s,
// frequency in Hz, time in s, ramp rates in MW/s, prices in $/MWh.

namespace reserveopt {

/// Frequency thresholds, governor delay and contingency definition.
/// Defaults are the ERCOT parameters: 60 Hz nominal, 1/60 Hz droop
/// dead-band, 59.85 Hz FFR trigger, 59.4 Hz critical threshold,
/// 0.2 s governor delay, 2750 MW design contingency.
struct SystemParams {
  double omega0 = 60.0;               // nominal frequency, Hz
  double omega1 = 60.0 - 1.0 / 60.0;  // low end of the droop dead-band, Hz
  double omega2 = 59.85;              // FFR deployment threshold, Hz
  double omega_min = 59.4;            // critical frequency threshold, Hz
  double epsilon = 0.2;               // governor response delay, s
  double contingency_mw = 2750.0;     // loss of generation L, MW
  double inertia_mws = 200000.0;      // post-outage system inertia M, MW*s

  bool operator==(const SystemParams&) const = default;
};

/// Dead-band and margin constants derived from the frequency thresholds.
struct Deltas {
  double d1 = 0.0;  // omega0 - omega1, droop dead-band width
  double d2 = 0.0;  // omega1 - omega2, gap down to the FFR trigger
  double d3 = 0.0;  // omega0 - d1 - d2 - omega_min, margin above the floor
};

Deltas derived_deltas(const SystemParams& p);

/// One piece of a convex piecewise-linear cost curve: the marginal price
/// applies from the previous breakpoint (or zero output) up to `up_to_mw`.
struct CostSegment {
  double up_to_mw = 0.0;
  double price = 0.0;  // $/MWh

  bool operator==(const CostSegment&) const = default;
};

using CostCurve = std::vector<CostSegment>;

/// Total cost of producing `output_mw`, integrating the marginal prices
/// from zero. Output beyond the last breakpoint extends the last price.
double cost_at(const CostCurve& curve, double output_mw);

struct GeneratorSpec {
  std::string id;
  int bus = 0;
  double g_min = 0.0;                // minimum dispatch, MW
  double g_max = 0.0;                // capacity, MW
  double droop_fraction = 0.05;      // droop percentage as a fraction
  double governor_ramp = 0.0;        // fixed governor ramp rate, MW/s
  double ramp_proportionality = 0.0; // ramp rate per MW of nominal PFR, 1/s
  double offered_pfr_cap = 0.0;      // offered PFR capacity, MW
  CostCurve cost_curve;

  bool operator==(const GeneratorSpec&) const = default;
};

struct FfrSpec {
  std::string id;
  int bus = 0;
  double offered_ffr_cap = 0.0;  // MW
  double price = 0.0;            // $/MWh, zero allowed

  bool operator==(const FfrSpec&) const = default;
};

struct NetworkLine {
  int from = 0;
  int to = 0;
  double susceptance = 0.0;  // per-unit flow per radian of angle difference
  double flow_limit = 0.0;   // MW

  bool operator==(const NetworkLine&) const = default;
};

struct Network {
  int n_buses = 0;
  std::vector<NetworkLine> lines;
  std::vector<double> demand;  // MW per bus

  double total_demand() const;
  bool connected() const;

  bool operator==(const Network&) const = default;
};

/// A dispatch-plus-reserve operating point. Per-generator vectors are
/// indexed like Scenario::generators, `ffr` like Scenario::ffr.
struct Allocation {
  std::vector<double> dispatch;       // G, MW
  std::vector<double> nominal_pfr;    // R, MW
  std::vector<double> available_pfr;  // r, MW
  std::vector<double> ffr;            // b, MW

  double total_available_pfr() const;
  double total_nominal_pfr() const;
  double total_ffr() const;

  bool operator==(const Allocation&) const = default;
};

struct Scenario {
  SystemParams params;
  std::vector<GeneratorSpec> generators;
  std::vector<FfrSpec> ffr;
  std::optional<Network> network;  // absent for simulation-only runs

  bool operator==(const Scenario&) const = default;
};

/// Checks every type invariant and returns one message per violation,
/// each naming the offending field and bound. Empty means valid.
std::vector<std::string> validate_scenario(const Scenario& s);

/// Allocation invariants against a scenario: sizes, nonnegativity,
/// r <= R <= R_bar, G + R <= G_bar, b <= b_bar. `tol` absorbs solver
/// round-off when checking LP output.
std::vector<std::string> validate_allocation(const Scenario& s, const Allocation& a,
                                             double tol = 1e-6);

}  // namespace reserveopt
