#include "reserveopt/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace reserveopt {

Deltas derived_deltas(const SystemParams& p) {
  Deltas d;
  d.d1 = p.omega0 - p.omega1;
  d.d2 = p.omega1 - p.omega2;
  d.d3 = p.omega0 - d.d1 - d.d2 - p.omega_min;
  return d;
}

double cost_at(const CostCurve& curve, double output_mw) {
  double cost = 0.0;
  double from = 0.0;
  for (const auto& seg : curve) {
    if (output_mw <= from) return cost;
    const double to = std::min(seg.up_to_mw, output_mw);
    if (to > from) cost += seg.price * (to - from);
    from = std::max(from, seg.up_to_mw);
  }
  if (output_mw > from && !curve.empty())
    cost += curve.back().price * (output_mw - from);
  return cost;
}

double Network::total_demand() const {
  return std::accumulate(demand.begin(), demand.end(), 0.0);
}

bool Network::connected() const {
  if (n_buses <= 0) return false;
  std::vector<std::vector<int>> adj(static_cast<size_t>(n_buses));
  for (const auto& ln : lines) {
    if (ln.from < 0 || ln.from >= n_buses || ln.to < 0 || ln.to >= n_buses) return false;
    adj[static_cast<size_t>(ln.from)].push_back(ln.to);
    adj[static_cast<size_t>(ln.to)].push_back(ln.from);
  }
  std::vector<char> seen(static_cast<size_t>(n_buses), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[static_cast<size_t>(u)]) {
      if (!seen[static_cast<size_t>(v)]) {
        seen[static_cast<size_t>(v)] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n_buses;
}

double Allocation::total_available_pfr() const {
  return std::accumulate(available_pfr.begin(), available_pfr.end(), 0.0);
}

double Allocation::total_nominal_pfr() const {
  return std::accumulate(nominal_pfr.begin(), nominal_pfr.end(), 0.0);
}

double Allocation::total_ffr() const {
  return std::accumulate(ffr.begin(), ffr.end(), 0.0);
}

namespace {

struct Violations {
  std::vector<std::string> list;

  void require(bool ok, const std::string& msg) {
    if (!ok) list.push_back(msg);
  }
};

std::string num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

void check_params(const SystemParams& p, Violations& v) {
  v.require(p.omega_min < p.omega2, "params: omega_min < omega2 violated (omega_min=" +
                                        num(p.omega_min) + ", omega2=" + num(p.omega2) + ")");
  v.require(p.omega2 < p.omega1, "params: omega2 < omega1 violated (omega2=" + num(p.omega2) +
                                     ", omega1=" + num(p.omega1) + ")");
  v.require(p.omega1 < p.omega0, "params: omega1 < omega0 violated (omega1=" + num(p.omega1) +
                                     ", omega0=" + num(p.omega0) + ")");
  v.require(p.epsilon >= 0.0, "params: epsilon >= 0 violated (epsilon=" + num(p.epsilon) + ")");
  v.require(p.contingency_mw > 0.0,
            "params: contingency_mw > 0 violated (contingency_mw=" + num(p.contingency_mw) + ")");
  v.require(p.inertia_mws > 0.0,
            "params: inertia_mws > 0 violated (inertia_mws=" + num(p.inertia_mws) + ")");
}

void check_generator(const GeneratorSpec& g, size_t idx, Violations& v) {
  const std::string who = "generator " + (g.id.empty() ? std::to_string(idx) : g.id);
  v.require(g.g_min >= 0.0, who + ": g_min >= 0 violated (g_min=" + num(g.g_min) + ")");
  v.require(g.g_min <= g.g_max, who + ": g_min <= g_max violated (g_min=" + num(g.g_min) +
                                    ", g_max=" + num(g.g_max) + ")");
  v.require(g.droop_fraction > 0.0,
            who + ": droop_fraction > 0 violated (droop_fraction=" + num(g.droop_fraction) + ")");
  v.require(g.governor_ramp >= 0.0,
            who + ": governor_ramp >= 0 violated (governor_ramp=" + num(g.governor_ramp) + ")");
  v.require(g.ramp_proportionality >= 0.0,
            who + ": ramp_proportionality >= 0 violated (ramp_proportionality=" +
                num(g.ramp_proportionality) + ")");
  v.require(g.offered_pfr_cap >= 0.0,
            who + ": offered_pfr_cap >= 0 violated (offered_pfr_cap=" + num(g.offered_pfr_cap) + ")");
  for (size_t k = 0; k < g.cost_curve.size(); ++k) {
    if (k > 0) {
      v.require(g.cost_curve[k].up_to_mw > g.cost_curve[k - 1].up_to_mw,
                who + ": cost_curve breakpoints not strictly increasing at segment " +
                    std::to_string(k));
      v.require(g.cost_curve[k].price >= g.cost_curve[k - 1].price,
                who + ": cost_curve not convex (marginal price drops from " +
                    num(g.cost_curve[k - 1].price) + " to " + num(g.cost_curve[k].price) +
                    " at segment " + std::to_string(k) + ")");
    }
  }
  if (!g.cost_curve.empty()) {
    v.require(g.cost_curve.front().up_to_mw > 0.0,
              who + ": cost_curve first breakpoint must be > 0");
    v.require(g.cost_curve.back().up_to_mw >= g.g_max,
              who + ": cost_curve must cover g_max (last breakpoint " +
                  num(g.cost_curve.back().up_to_mw) + " < g_max " + num(g.g_max) + ")");
  }
}

}  // namespace

std::vector<std::string> validate_scenario(const Scenario& s) {
  Violations v;
  check_params(s.params, v);
  v.require(!s.generators.empty(), "scenario: at least one generator required");
  for (size_t i = 0; i < s.generators.size(); ++i) check_generator(s.generators[i], i, v);
  for (size_t j = 0; j < s.ffr.size(); ++j) {
    const auto& f = s.ffr[j];
    const std::string who = "ffr " + (f.id.empty() ? std::to_string(j) : f.id);
    v.require(f.offered_ffr_cap >= 0.0,
              who + ": offered_ffr_cap >= 0 violated (offered_ffr_cap=" + num(f.offered_ffr_cap) + ")");
  }
  if (s.network) {
    const Network& net = *s.network;
    v.require(net.n_buses >= 1, "network: n_buses >= 1 violated");
    v.require(static_cast<int>(net.demand.size()) == net.n_buses,
              "network: demand size " + std::to_string(net.demand.size()) +
                  " != n_buses " + std::to_string(net.n_buses));
    for (size_t l = 0; l < net.lines.size(); ++l) {
      const auto& ln = net.lines[l];
      const std::string who = "network line " + std::to_string(l);
      v.require(ln.from >= 0 && ln.from < net.n_buses && ln.to >= 0 && ln.to < net.n_buses,
                who + ": bus index out of range");
      v.require(ln.from != ln.to, who + ": self-loop");
      v.require(ln.susceptance > 0.0,
                who + ": susceptance > 0 violated (susceptance=" + num(ln.susceptance) + ")");
      v.require(ln.flow_limit > 0.0,
                who + ": flow_limit > 0 violated (flow_limit=" + num(ln.flow_limit) + ")");
    }
    if (net.n_buses >= 1 && !net.connected())
      v.list.push_back("network: graph not connected");
    for (size_t i = 0; i < s.generators.size(); ++i)
      v.require(s.generators[i].bus >= 0 && s.generators[i].bus < net.n_buses,
                "generator " + s.generators[i].id + ": bus index out of range");
    for (size_t j = 0; j < s.ffr.size(); ++j)
      v.require(s.ffr[j].bus >= 0 && s.ffr[j].bus < net.n_buses,
                "ffr " + s.ffr[j].id + ": bus index out of range");
  }
  return v.list;
}

std::vector<std::string> validate_allocation(const Scenario& s, const Allocation& a, double tol) {
  Violations v;
  const size_t n = s.generators.size();
  const size_t m = s.ffr.size();
  v.require(a.dispatch.size() == n, "allocation: dispatch size != generator count");
  v.require(a.nominal_pfr.size() == n, "allocation: nominal_pfr size != generator count");
  v.require(a.available_pfr.size() == n, "allocation: available_pfr size != generator count");
  v.require(a.ffr.size() == m, "allocation: ffr size != ffr resource count");
  if (!v.list.empty()) return v.list;
  for (size_t i = 0; i < n; ++i) {
    const auto& g = s.generators[i];
    const std::string who = "allocation[" + g.id + "]";
    v.require(a.dispatch[i] >= -tol, who + ": G >= 0 violated");
    v.require(a.nominal_pfr[i] >= -tol, who + ": R >= 0 violated");
    v.require(a.available_pfr[i] >= -tol, who + ": r >= 0 violated");
    v.require(a.available_pfr[i] <= a.nominal_pfr[i] + tol, who + ": r <= R violated (r=" +
                                                                num(a.available_pfr[i]) + ", R=" +
                                                                num(a.nominal_pfr[i]) + ")");
    v.require(a.nominal_pfr[i] <= g.offered_pfr_cap + tol,
              who + ": R <= offered_pfr_cap violated (R=" + num(a.nominal_pfr[i]) +
                  ", cap=" + num(g.offered_pfr_cap) + ")");
    v.require(a.dispatch[i] + a.nominal_pfr[i] <= g.g_max + tol,
              who + ": G + R <= g_max violated (G+R=" + num(a.dispatch[i] + a.nominal_pfr[i]) +
                  ", g_max=" + num(g.g_max) + ")");
  }
  for (size_t j = 0; j < m; ++j) {
    const auto& f = s.ffr[j];
    const std::string who = "allocation[" + f.id + "]";
    v.require(a.ffr[j] >= -tol, who + ": b >= 0 violated");
    v.require(a.ffr[j] <= f.offered_ffr_cap + tol,
              who + ": b <= offered_ffr_cap violated (b=" + num(a.ffr[j]) +
                  ", cap=" + num(f.offered_ffr_cap) + ")");
  }
  return v.list;
}

}  // namespace reserveopt
