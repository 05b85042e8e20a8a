#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "reserveopt/requirements.hpp"
#include "reserveopt/types.hpp"

namespace reserveopt {

/// Parsed case file: a validated scenario plus the optional bundled
/// equivalency table.
struct CaseFile {
  Scenario scenario;
  std::optional<EquivalencyTable> equivalency;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Loads and validates a scenario JSON file. Parse errors carry
/// line/column; validation errors report every violation at once.
Scenario load_scenario(const std::string& path);
CaseFile load_case(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

std::string scenario_to_json(const Scenario& s);
CaseFile case_from_json(const std::string& text, const std::string& origin = "<string>");

/// Allocation files: {"G": [...], "R": [...], "r": [...], "b": [...]}.
Allocation load_allocation(const std::string& path);
void save_allocation(const Allocation& a, const std::string& path);

/// CSV with header `inertia_gws,rfrr_mw,ratio`; inertia converted to MW*s.
EquivalencyTable load_equivalency_csv(const std::string& path);

struct SyntheticCaseConfig {
  int n_generators = 120;
  int n_pfr = 50;            // largest units made PFR-eligible
  int n_ffr = 4;
  int n_buses = 30;
  double total_ffr_cap_mw = 600.0;
  double contingency_mw = 2500.0;  // requirement quantity, load-response adjusted
  double inertia_mws = 200000.0;
  double governor_ramp = 20.0;          // MW/s on PFR-eligible units
  double ramp_proportionality = 0.2;    // 1/s on PFR-eligible units
  std::uint64_t seed = 42;
};

/// Deterministic Texas-like case: log-normal capacities in [50, 1400] MW,
/// convex 2-3 segment cost curves, a connected random network with
/// generous line limits, PFR caps of 0.2*g_max on the largest units, and
/// demand leaving comfortable headroom above reserve needs.
Scenario generate_synthetic_case(const SyntheticCaseConfig& cfg);

}  // namespace reserveopt
