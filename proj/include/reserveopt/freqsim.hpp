#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "reserveopt/types.hpp"

namespace reserveopt {

enum class SimEventKind {
  deadband_crossed,
  ramp_start,
  ffr_deployed,
  generator_saturated,
  balance_restored,
  nadir,
  floor_violated,
};

const char* to_string(SimEventKind k);

struct SimEvent {
  double time_s = 0.0;
  SimEventKind kind = SimEventKind::deadband_crossed;
  int generator = -1;  // index for generator_saturated, else -1
};

/// One piece of the exact piecewise-quadratic trajectory. The net power
/// imbalance is affine within a segment, so
///   omega(t) = c0 + c1*(t - t_start) + c2*(t - t_start)^2.
struct SimSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;
  double imbalance0_mw = 0.0;  // net imbalance at t_start
  double ramp_rate_mw_s = 0.0; // active governor ramping total
  double ffr_mw = 0.0;         // FFR deployed during this segment
};

enum class RampModel { fixed_rate, proportional };

struct SimOptions {
  RampModel ramp_model = RampModel::fixed_rate;
  /// Hard termination floor; nullopt disables it, in which case a run
  /// that can never restore balance raises SimulationError.
  std::optional<double> floor_hz = 57.0;
  /// Extra segment boundaries (test hook; no physical effect).
  std::vector<double> extra_breakpoints;
};

struct SimResult {
  std::vector<SimSegment> segments;
  std::vector<SimEvent> events;
  double nadir_hz = 0.0;
  double nadir_time_s = 0.0;
  bool balance_restored = false;  // false means the floor terminated the run
  double end_time_s = 0.0;
  double added_generation_mw = 0.0;  // governor output above dispatch at the end
  double ffr_deployed_mw = 0.0;
  double dispatch_total_mw = 0.0;

  double omega_at(double t) const;
  double imbalance_at(double t) const;
};

struct SimulationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Integrates the post-outage swing equation exactly. The outage of size
/// L = params.contingency_mw hits at t = 0; generators hold dispatch
/// until the frequency crosses omega0 - delta1, wait `epsilon`, then ramp
/// at their governor rate (kappa, or lambda*R under the proportional
/// model) until the available PFR r_i is delivered; total FFR steps in at
/// the first downward crossing of omega2. Runs until balance is restored
/// (the nadir, absent damping) or the floor is hit.
SimResult simulate_outage(const Scenario& s, const Allocation& a, const SimOptions& opts = {});

/// Minimum of the piecewise-quadratic trajectory and its time.
std::pair<double, double> nadir_of(const SimResult& r);

/// Trajectory CSV: `t_s,omega_hz,total_mech_mw,ffr_mw,imbalance_mw`
/// sampled every dt_s plus every event instant.
void write_trajectory_csv(std::ostream& os, const SimResult& r, const Scenario& s, double dt_s);

struct TheoremCounterexample {
  int sample = -1;
  double nadir_hz = 0.0;
  Allocation allocation;
};

struct TheoremReport {
  int requested = 0;
  int simulated = 0;
  int rejected_draws = 0;
  double min_nadir_hz = 0.0;
  double threshold_hz = 0.0;  // omega_min - tolerance
  std::vector<TheoremCounterexample> counterexamples;
  bool sampler_failed = false;
  std::string sampler_message;
};

/// Samples `n_samples` allocations satisfying the general requirement and
/// the rate-based limit (fixed-rate model) under the scenario's inertia,
/// simulates each, and reports the minimum nadir plus any counterexample
/// to the sufficiency claim. Throws std::domain_error if the scenario
/// violates the minimum-inertia assumption.
TheoremReport verify_theorem1(const Scenario& s, std::uint64_t seed, int n_samples);

}  // namespace reserveopt
