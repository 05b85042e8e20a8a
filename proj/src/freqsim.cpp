#include "reserveopt/freqsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "reserveopt/requirements.hpp"

namespace reserveopt {

const char* to_string(SimEventKind k) {
  switch (k) {
    case SimEventKind::deadband_crossed: return "deadband_crossed";
    case SimEventKind::ramp_start: return "ramp_start";
    case SimEventKind::ffr_deployed: return "ffr_deployed";
    case SimEventKind::generator_saturated: return "generator_saturated";
    case SimEventKind::balance_restored: return "balance_restored";
    case SimEventKind::nadir: return "nadir";
    case SimEventKind::floor_violated: return "floor_violated";
  }
  return "unknown";
}

namespace {

constexpr double kBalanceTolMw = 1e-9;

// Smallest tau >= 0 with c0 + B*tau + C*tau^2 == target, reached from
// above while the frequency is falling. C >= 0 always (governors only
// add power), so the curve is a falling parabola opening upward.
std::optional<double> downward_crossing(double c0, double B, double C, double target) {
  if (c0 <= target) return 0.0;
  if (B >= 0.0) return std::nullopt;  // not falling
  if (C <= 0.0) return (target - c0) / B;
  const double disc = B * B - 4.0 * C * (c0 - target);
  if (disc < 0.0) return std::nullopt;  // bottoms out above target
  const double q = 0.5 * (std::sqrt(disc) - B);
  return (c0 - target) / q;  // smaller root, cancellation-free
}

struct Candidate {
  double t;
  int priority;  // deadband < ramp_start < ffr < saturation < balance < floor < breakpoint
  int gen;
};

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

}  // namespace

SimResult simulate_outage(const Scenario& s, const Allocation& a, const SimOptions& opts) {
  if (auto v = validate_scenario(s); !v.empty())
    throw std::invalid_argument("simulate_outage: invalid scenario: " + join(v));
  if (auto v = validate_allocation(s, a); !v.empty())
    throw std::invalid_argument("simulate_outage: invalid allocation: " + join(v));

  const SystemParams& p = s.params;
  const Deltas d = derived_deltas(p);
  const double L = p.contingency_mw;
  const double k = p.omega0 / (2.0 * p.inertia_mws);
  const size_t n = s.generators.size();

  std::vector<double> rate(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    const auto& g = s.generators[i];
    rate[i] = opts.ramp_model == RampModel::fixed_rate
                  ? g.governor_ramp
                  : g.ramp_proportionality * a.nominal_pfr[i];
  }
  const double total_ffr = a.total_ffr();

  SimResult res;
  double t = 0.0;
  double omega = p.omega0;
  double imb = -L;  // net power imbalance: added mech + FFR - L
  double rho = 0.0; // active governor ramping
  double ffr_active = 0.0;
  bool deadband_done = false;
  bool ramp_started = false;
  bool ffr_done = total_ffr <= 0.0;
  double t_ramp_start = std::numeric_limits<double>::infinity();

  struct Saturation {
    double t;
    int gen;
  };
  std::vector<Saturation> sats;
  size_t sat_next = 0;

  std::vector<double> bps = opts.extra_breakpoints;
  std::sort(bps.begin(), bps.end());
  size_t bp_next = 0;
  while (bp_next < bps.size() && bps[bp_next] <= 0.0) ++bp_next;

  const double omega1 = p.omega0 - d.d1;

  bool done = false;
  for (int guard = 0; !done; ++guard) {
    if (guard > 1000000) throw SimulationError("simulate_outage: event limit exceeded");

    const double B = k * imb;
    const double C = 0.5 * k * rho;

    std::vector<Candidate> cands;
    if (!deadband_done) {
      if (auto tau = downward_crossing(omega, B, C, omega1)) cands.push_back({t + *tau, 0, -1});
    }
    if (deadband_done && !ramp_started) cands.push_back({t_ramp_start, 1, -1});
    if (!ffr_done) {
      if (auto tau = downward_crossing(omega, B, C, p.omega2)) cands.push_back({t + *tau, 2, -1});
    }
    if (ramp_started && sat_next < sats.size()) cands.push_back({sats[sat_next].t, 3, sats[sat_next].gen});
    if (imb >= -kBalanceTolMw)
      cands.push_back({t, 4, -1});
    else if (rho > 0.0)
      cands.push_back({t - imb / rho, 4, -1});
    if (opts.floor_hz) {
      if (auto tau = downward_crossing(omega, B, C, *opts.floor_hz)) cands.push_back({t + *tau, 5, -1});
    }
    if (bp_next < bps.size()) cands.push_back({bps[bp_next], 6, -1});

    if (cands.empty()) {
      std::ostringstream os;
      os << "simulate_outage: unbounded decline at t=" << t << " s (remaining imbalance " << -imb
         << " MW can never be restored; deliverable PFR plus FFR is below the contingency and no "
            "floor is configured)";
      throw SimulationError(os.str());
    }

    double t_next = cands.front().t;
    for (const auto& c : cands) t_next = std::min(t_next, c.t);
    t_next = std::max(t_next, t);
    const double ctol = 1e-10 * std::max(1.0, t_next);

    std::vector<Candidate> group;
    for (const auto& c : cands)
      if (c.t <= t_next + ctol) group.push_back(c);
    std::sort(group.begin(), group.end(), [](const Candidate& x, const Candidate& y) {
      if (x.priority != y.priority) return x.priority < y.priority;
      return x.gen < y.gen;
    });

    const double tau = t_next - t;
    if (tau > 0.0) {
      res.segments.push_back({t, t_next, omega, B, C, imb, rho, ffr_active});
      omega += B * tau + C * tau * tau;
      imb += rho * tau;
    }
    t = t_next;

    bool balance_now = false;
    for (const auto& ev : group) {
      switch (ev.priority) {
        case 0:
          if (deadband_done) break;
          deadband_done = true;
          res.events.push_back({t, SimEventKind::deadband_crossed, -1});
          t_ramp_start = t + p.epsilon;
          break;
        case 1: {
          if (ramp_started) break;
          ramp_started = true;
          res.events.push_back({t, SimEventKind::ramp_start, -1});
          for (size_t i = 0; i < n; ++i) {
            if (rate[i] > 0.0 && a.available_pfr[i] > 0.0) {
              rho += rate[i];
              sats.push_back({t + a.available_pfr[i] / rate[i], static_cast<int>(i)});
            }
          }
          std::sort(sats.begin(), sats.end(), [](const Saturation& x, const Saturation& y) {
            if (x.t != y.t) return x.t < y.t;
            return x.gen < y.gen;
          });
          break;
        }
        case 2:
          if (ffr_done) break;
          ffr_done = true;
          res.events.push_back({t, SimEventKind::ffr_deployed, -1});
          imb += total_ffr;
          ffr_active = total_ffr;
          if (imb >= -kBalanceTolMw) balance_now = true;
          break;
        case 3:
          while (sat_next < sats.size() && sats[sat_next].t <= t + ctol) {
            res.events.push_back({t, SimEventKind::generator_saturated, sats[sat_next].gen});
            rho -= rate[static_cast<size_t>(sats[sat_next].gen)];
            ++sat_next;
          }
          if (rho < 0.0) rho = 0.0;  // fp residue after the last saturation
          break;
        case 4:
          balance_now = true;
          break;
        case 5:
          res.events.push_back({t, SimEventKind::floor_violated, -1});
          omega = *opts.floor_hz;
          res.balance_restored = false;
          done = true;
          break;
        case 6:
          while (bp_next < bps.size() && bps[bp_next] <= t + ctol) ++bp_next;
          break;
      }
      if (done || balance_now) break;
    }

    if (!done && balance_now) {
      res.events.push_back({t, SimEventKind::balance_restored, -1});
      res.events.push_back({t, SimEventKind::nadir, -1});
      res.balance_restored = true;
      done = true;
    }
  }

  res.end_time_s = t;
  res.ffr_deployed_mw = ffr_active;
  res.added_generation_mw = imb + L - ffr_active;
  res.dispatch_total_mw = std::accumulate(a.dispatch.begin(), a.dispatch.end(), 0.0);
  const auto [nadir, nadir_t] = nadir_of(res);
  res.nadir_hz = res.segments.empty() ? omega : nadir;
  res.nadir_time_s = res.segments.empty() ? t : nadir_t;
  return res;
}

std::pair<double, double> nadir_of(const SimResult& r) {
  double best = std::numeric_limits<double>::infinity();
  double best_t = 0.0;
  auto consider = [&](double w, double tt) {
    if (w < best) {
      best = w;
      best_t = tt;
    }
  };
  for (const auto& seg : r.segments) {
    const double len = seg.t_end - seg.t_start;
    consider(seg.c0, seg.t_start);
    consider(seg.c0 + seg.c1 * len + seg.c2 * len * len, seg.t_end);
    if (seg.c2 > 0.0) {
      const double tv = -seg.c1 / (2.0 * seg.c2);
      if (tv > 0.0 && tv < len)
        consider(seg.c0 + seg.c1 * tv + seg.c2 * tv * tv, seg.t_start + tv);
    }
  }
  if (r.segments.empty()) return {r.nadir_hz, r.nadir_time_s};
  return {best, best_t};
}

namespace {

const SimSegment* segment_at(const std::vector<SimSegment>& segs, double t) {
  if (segs.empty()) return nullptr;
  auto it = std::lower_bound(segs.begin(), segs.end(), t,
                             [](const SimSegment& s, double x) { return s.t_end < x; });
  if (it == segs.end()) --it;
  return &*it;
}

}  // namespace

double SimResult::omega_at(double t) const {
  const SimSegment* seg = segment_at(segments, t);
  if (!seg) return nadir_hz;
  const double tau = std::clamp(t, seg->t_start, seg->t_end) - seg->t_start;
  return seg->c0 + seg->c1 * tau + seg->c2 * tau * tau;
}

double SimResult::imbalance_at(double t) const {
  const SimSegment* seg = segment_at(segments, t);
  if (!seg) return 0.0;
  const double tau = std::clamp(t, seg->t_start, seg->t_end) - seg->t_start;
  return seg->imbalance0_mw + seg->ramp_rate_mw_s * tau;
}

void write_trajectory_csv(std::ostream& os, const SimResult& r, const Scenario& s, double dt_s) {
  std::vector<double> times;
  const double end = r.end_time_s;
  if (dt_s > 0.0) {
    for (double t = 0.0; t < end; t += dt_s) times.push_back(t);
  }
  times.push_back(end);
  for (const auto& ev : r.events) times.push_back(ev.time_s);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              times.end());

  os << "t_s,omega_hz,total_mech_mw,ffr_mw,imbalance_mw\n";
  const double L = s.params.contingency_mw;
  char buf[192];
  for (double t : times) {
    const SimSegment* seg = segment_at(r.segments, t);
    const double ffr = seg ? seg->ffr_mw : r.ffr_deployed_mw;
    const double imb = r.imbalance_at(t);
    const double mech = r.dispatch_total_mw + imb + L - ffr;
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g\n", t, r.omega_at(t), mech, ffr,
                  imb);
    os << buf;
  }
}

TheoremReport verify_theorem1(const Scenario& s, std::uint64_t seed, int n_samples) {
  const SystemParams& p = s.params;
  if (!assumption_holds(p.inertia_mws, p)) {
    std::ostringstream os;
    os << "verify_theorem1: scenario inertia " << p.inertia_mws
       << " MW*s is below the minimum-inertia bound " << min_inertia_for_assumption(p)
       << " MW*s (epsilon*L*omega0/(2*delta2))";
    throw std::domain_error(os.str());
  }
  if (auto v = validate_scenario(s); !v.empty())
    throw std::invalid_argument("verify_theorem1: invalid scenario: " + join(v));

  TheoremReport rep;
  rep.requested = n_samples;
  rep.threshold_hz = p.omega_min - 1e-6;
  rep.min_nadir_hz = p.omega0;

  const double L = p.contingency_mw;
  const size_t n = s.generators.size();
  const size_t m = s.ffr.size();

  for (int sample = 0; sample < n_samples; ++sample) {
    std::mt19937_64 rng(splitmix64(seed + 0x9e3779b97f4a7c15ULL * static_cast<uint64_t>(sample + 1)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Allocation alloc;
    bool made = false;
    for (int attempt = 0; attempt < 200 && !made; ++attempt) {
      std::vector<double> b(m, 0.0);
      for (size_t j = 0; j < m; ++j) b[j] = unit(rng) * s.ffr[j].offered_ffr_cap;
      const double btil = std::accumulate(b.begin(), b.end(), 0.0);

      std::vector<double> r(n, 0.0);
      if (btil < L) {
        const double h = limit_function_h(p.inertia_mws, btil, p);
        std::vector<double> cap(n, 0.0);
        double cap_total = 0.0;
        for (size_t i = 0; i < n; ++i) {
          const auto& g = s.generators[i];
          cap[i] = std::max(0.0, std::min({g.offered_pfr_cap, g.g_max - g.g_min,
                                           g.governor_ramp * h}));
          cap_total += cap[i];
        }
        const double need = L - btil;
        if (cap_total < need) {
          ++rep.rejected_draws;
          continue;
        }
        const double target = need + unit(rng) * (cap_total - need);
        if (sample % 2 == 0) {
          for (size_t i = 0; i < n; ++i) r[i] = cap[i] * target / cap_total;
        } else {
          std::vector<size_t> order(n);
          std::iota(order.begin(), order.end(), size_t{0});
          std::shuffle(order.begin(), order.end(), rng);
          double remaining = target;
          for (size_t i : order) {
            r[i] = std::min(cap[i], remaining);
            remaining -= r[i];
            if (remaining <= 0.0) break;
          }
        }
      }

      alloc.dispatch.assign(n, 0.0);
      alloc.nominal_pfr = r;
      alloc.available_pfr = r;
      alloc.ffr = b;
      for (size_t i = 0; i < n; ++i) alloc.dispatch[i] = s.generators[i].g_min;
      made = true;
    }
    if (!made) {
      rep.sampler_failed = true;
      std::ostringstream os;
      os << "sampler could not find a feasible allocation after 200 attempts at sample " << sample
         << " (constraint set may be empty: deliverable PFR caps plus FFR caps fall short of L)";
      rep.sampler_message = os.str();
      break;
    }

    const SimResult sr = simulate_outage(s, alloc, SimOptions{});
    ++rep.simulated;
    if (sr.nadir_hz < rep.min_nadir_hz) rep.min_nadir_hz = sr.nadir_hz;
    if (sr.nadir_hz < rep.threshold_hz)
      rep.counterexamples.push_back({sample, sr.nadir_hz, alloc});
  }
  return rep;
}

}  // namespace reserveopt
