#include "reserveopt/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace reserveopt {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open file for writing: " + path);
  out << text;
}

std::pair<int, int> line_col(const std::string& text, size_t byte) {
  int line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

struct FieldReader {
  const json& j;
  std::string prefix;
  std::vector<std::string>& errors;

  double number(const char* key, double fallback = 0.0, bool required = true) const {
    if (!j.contains(key)) {
      if (required) errors.push_back(prefix + "." + key + ": missing");
      return fallback;
    }
    if (!j[key].is_number()) {
      errors.push_back(prefix + "." + key + ": expected a number");
      return fallback;
    }
    return j[key].get<double>();
  }

  int integer(const char* key, int fallback = 0, bool required = true) const {
    if (!j.contains(key)) {
      if (required) errors.push_back(prefix + "." + key + ": missing");
      return fallback;
    }
    if (!j[key].is_number_integer()) {
      errors.push_back(prefix + "." + key + ": expected an integer");
      return fallback;
    }
    return j[key].get<int>();
  }

  std::string text(const char* key, const std::string& fallback = {}) const {
    if (!j.contains(key) || !j[key].is_string()) return fallback;
    return j[key].get<std::string>();
  }
};

std::vector<double> number_array(const json& j, const std::string& where,
                                 std::vector<std::string>& errors) {
  std::vector<double> out;
  if (!j.is_array()) {
    errors.push_back(where + ": expected an array of numbers");
    return out;
  }
  for (const auto& e : j) {
    if (!e.is_number()) {
      errors.push_back(where + ": expected an array of numbers");
      return out;
    }
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

CaseFile case_from_json(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    std::ostringstream os;
    os << origin << ":" << line << ":" << col << ": JSON parse error: " << e.what();
    throw IoError(os.str());
  }

  std::vector<std::string> errors;
  CaseFile cf;
  Scenario& s = cf.scenario;

  if (!j.contains("params")) {
    errors.push_back("params: missing");
  } else {
    FieldReader f{j["params"], "params", errors};
    s.params.omega0 = f.number("omega0");
    s.params.omega1 = f.number("omega1");
    s.params.omega2 = f.number("omega2");
    s.params.omega_min = f.number("omega_min");
    s.params.epsilon = f.number("epsilon");
    s.params.contingency_mw = f.number("contingency_L");
    s.params.inertia_mws = f.number("inertia_M");
  }

  if (!j.contains("generators") || !j["generators"].is_array()) {
    errors.push_back("generators: missing or not an array");
  } else {
    size_t idx = 0;
    for (const auto& gj : j["generators"]) {
      GeneratorSpec g;
      FieldReader f{gj, "generators[" + std::to_string(idx) + "]", errors};
      g.id = f.text("id", "g" + std::to_string(idx));
      g.bus = f.integer("bus", 0, false);
      g.g_min = f.number("g_min");
      g.g_max = f.number("g_max");
      g.droop_fraction = f.number("droop_fraction", 0.05, false);
      g.governor_ramp = f.number("governor_ramp", 0.0, false);
      g.ramp_proportionality = f.number("ramp_proportionality", 0.0, false);
      g.offered_pfr_cap = f.number("offered_pfr_cap", 0.0, false);
      if (gj.contains("cost_curve")) {
        for (const auto& seg : gj["cost_curve"]) {
          if (!seg.is_array() || seg.size() != 2 || !seg[0].is_number() || !seg[1].is_number()) {
            errors.push_back(f.prefix + ".cost_curve: expected [breakpoint_mw, price] pairs");
            break;
          }
          g.cost_curve.push_back({seg[0].get<double>(), seg[1].get<double>()});
        }
      }
      s.generators.push_back(std::move(g));
      ++idx;
    }
  }

  if (j.contains("ffr")) {
    size_t idx = 0;
    for (const auto& fj : j["ffr"]) {
      FfrSpec f;
      FieldReader fr{fj, "ffr[" + std::to_string(idx) + "]", errors};
      f.id = fr.text("id", "f" + std::to_string(idx));
      f.bus = fr.integer("bus", 0, false);
      f.offered_ffr_cap = fr.number("offered_ffr_cap");
      f.price = fr.number("price", 0.0, false);
      s.ffr.push_back(std::move(f));
      ++idx;
    }
  }

  if (j.contains("network") && !j["network"].is_null()) {
    Network net;
    FieldReader f{j["network"], "network", errors};
    net.n_buses = f.integer("n_buses");
    if (j["network"].contains("lines")) {
      size_t idx = 0;
      for (const auto& lj : j["network"]["lines"]) {
        if (!lj.is_array() || lj.size() != 4) {
          errors.push_back("network.lines[" + std::to_string(idx) +
                           "]: expected [from, to, susceptance, flow_limit]");
          break;
        }
        net.lines.push_back({lj[0].get<int>(), lj[1].get<int>(), lj[2].get<double>(),
                             lj[3].get<double>()});
        ++idx;
      }
    }
    if (j["network"].contains("demand"))
      net.demand = number_array(j["network"]["demand"], "network.demand", errors);
    s.network = std::move(net);
  }

  if (j.contains("equivalency_table")) {
    EquivalencyTable t;
    size_t idx = 0;
    for (const auto& row : j["equivalency_table"]) {
      if (!row.is_array() || row.size() != 3) {
        errors.push_back("equivalency_table[" + std::to_string(idx) +
                         "]: expected [inertia_mws, rfrr_mw, ratio]");
        break;
      }
      t.rows.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
      ++idx;
    }
    for (const auto& e : t.validate()) errors.push_back(e);
    cf.equivalency = std::move(t);
  }

  if (!errors.empty()) {
    std::string msg = origin + ": invalid case file:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw IoError(msg);
  }

  if (auto viol = validate_scenario(s); !viol.empty()) {
    std::string msg = origin + ": scenario validation failed:";
    for (const auto& e : viol) msg += "\n  " + e;
    throw IoError(msg);
  }
  return cf;
}

CaseFile load_case(const std::string& path) { return case_from_json(read_file(path), path); }

Scenario load_scenario(const std::string& path) { return load_case(path).scenario; }

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["params"] = {{"omega0", s.params.omega0},
                 {"omega1", s.params.omega1},
                 {"omega2", s.params.omega2},
                 {"omega_min", s.params.omega_min},
                 {"epsilon", s.params.epsilon},
                 {"contingency_L", s.params.contingency_mw},
                 {"inertia_M", s.params.inertia_mws}};
  j["generators"] = json::array();
  for (const auto& g : s.generators) {
    json gj = {{"id", g.id},
               {"bus", g.bus},
               {"g_min", g.g_min},
               {"g_max", g.g_max},
               {"droop_fraction", g.droop_fraction},
               {"governor_ramp", g.governor_ramp},
               {"ramp_proportionality", g.ramp_proportionality},
               {"offered_pfr_cap", g.offered_pfr_cap}};
    json curve = json::array();
    for (const auto& seg : g.cost_curve) curve.push_back({seg.up_to_mw, seg.price});
    gj["cost_curve"] = std::move(curve);
    j["generators"].push_back(std::move(gj));
  }
  j["ffr"] = json::array();
  for (const auto& f : s.ffr)
    j["ffr"].push_back({{"id", f.id},
                        {"bus", f.bus},
                        {"offered_ffr_cap", f.offered_ffr_cap},
                        {"price", f.price}});
  if (s.network) {
    json nj;
    nj["n_buses"] = s.network->n_buses;
    nj["lines"] = json::array();
    for (const auto& ln : s.network->lines)
      nj["lines"].push_back({ln.from, ln.to, ln.susceptance, ln.flow_limit});
    nj["demand"] = s.network->demand;
    j["network"] = std::move(nj);
  }
  return j.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::string& path) {
  write_file(path, scenario_to_json(s));
}

Allocation load_allocation(const std::string& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    std::ostringstream os;
    os << path << ":" << line << ":" << col << ": JSON parse error: " << e.what();
    throw IoError(os.str());
  }
  std::vector<std::string> errors;
  Allocation a;
  a.dispatch = j.contains("G") ? number_array(j["G"], "G", errors)
                               : (errors.push_back("G: missing"), std::vector<double>{});
  a.nominal_pfr = j.contains("R") ? number_array(j["R"], "R", errors)
                                  : (errors.push_back("R: missing"), std::vector<double>{});
  a.available_pfr = j.contains("r") ? number_array(j["r"], "r", errors)
                                    : (errors.push_back("r: missing"), std::vector<double>{});
  a.ffr = j.contains("b") ? number_array(j["b"], "b", errors) : std::vector<double>{};
  if (!errors.empty()) {
    std::string msg = path + ": invalid allocation file:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw IoError(msg);
  }
  return a;
}

void save_allocation(const Allocation& a, const std::string& path) {
  json j;
  j["G"] = a.dispatch;
  j["R"] = a.nominal_pfr;
  j["r"] = a.available_pfr;
  j["b"] = a.ffr;
  write_file(path, j.dump(2) + "\n");
}

EquivalencyTable load_equivalency_csv(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty equivalency CSV");
  auto strip = [](std::string v) {
    v.erase(std::remove_if(v.begin(), v.end(), [](unsigned char c) { return std::isspace(c); }),
            v.end());
    return v;
  };
  if (strip(line) != "inertia_gws,rfrr_mw,ratio")
    throw IoError(path + ": expected header `inertia_gws,rfrr_mw,ratio`, got `" + line + "`");
  EquivalencyTable t;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (strip(line).empty()) continue;
    std::istringstream ls(line);
    std::string a, b, c;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c)) {
      throw IoError(path + ":" + std::to_string(lineno) + ": expected three comma-separated values");
    }
    try {
      t.rows.push_back({std::stod(a) * 1000.0, std::stod(b), std::stod(c)});
    } catch (const std::exception&) {
      throw IoError(path + ":" + std::to_string(lineno) + ": could not parse numbers");
    }
  }
  if (auto viol = t.validate(); !viol.empty()) {
    std::string msg = path + ": invalid equivalency table:";
    for (const auto& e : viol) msg += "\n  " + e;
    throw IoError(msg);
  }
  return t;
}

Scenario generate_synthetic_case(const SyntheticCaseConfig& cfg) {
  if (cfg.n_generators < 1 || cfg.n_buses < 1 || cfg.n_ffr < 0)
    throw std::invalid_argument("generate_synthetic_case: counts must be positive");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Scenario s;
  s.params = SystemParams{};
  s.params.contingency_mw = cfg.contingency_mw;
  s.params.inertia_mws = cfg.inertia_mws;

  const int n = cfg.n_generators;
  std::lognormal_distribution<double> capdist(std::log(330.0), 0.75);
  std::vector<double> caps(static_cast<size_t>(n));
  for (auto& c : caps) c = std::clamp(std::round(capdist(rng)), 50.0, 1400.0);

  // PFR eligibility goes to the largest units
  std::vector<size_t> order(caps.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return caps[a] > caps[b]; });
  std::vector<char> pfr(static_cast<size_t>(n), 0);
  for (int k = 0; k < std::min(cfg.n_pfr, n); ++k) pfr[order[static_cast<size_t>(k)]] = 1;

  for (int i = 0; i < n; ++i) {
    GeneratorSpec g;
    g.id = "g" + std::to_string(i);
    g.bus = static_cast<int>(rng() % static_cast<uint64_t>(cfg.n_buses));
    g.g_min = 0.0;
    g.g_max = caps[static_cast<size_t>(i)];
    g.droop_fraction = 0.05;
    if (pfr[static_cast<size_t>(i)]) {
      g.governor_ramp = cfg.governor_ramp;
      g.ramp_proportionality = cfg.ramp_proportionality;
      g.offered_pfr_cap = 0.2 * g.g_max;  // the 5%-droop offered-cap rule
    }
    const double base = 15.0 + 30.0 * unit(rng);
    const int nseg = unit(rng) < 0.5 ? 2 : 3;
    double price = base;
    double at = g.g_max * (0.45 + 0.2 * unit(rng));
    for (int k = 0; k < nseg; ++k) {
      const bool last = k == nseg - 1;
      g.cost_curve.push_back({last ? g.g_max : at, price});
      price += 2.0 + 10.0 * unit(rng);
      at = std::min(g.g_max, at + g.g_max * (0.2 + 0.15 * unit(rng)));
    }
    s.generators.push_back(std::move(g));
  }

  // FFR caps split randomly but summing exactly to the configured total
  std::vector<double> w(static_cast<size_t>(cfg.n_ffr));
  double wsum = 0.0;
  for (auto& x : w) {
    x = 0.3 + unit(rng);
    wsum += x;
  }
  double assigned = 0.0;
  for (int jf = 0; jf < cfg.n_ffr; ++jf) {
    FfrSpec f;
    f.id = "f" + std::to_string(jf);
    f.bus = static_cast<int>(rng() % static_cast<uint64_t>(cfg.n_buses));
    f.offered_ffr_cap = jf + 1 == cfg.n_ffr
                            ? cfg.total_ffr_cap_mw - assigned
                            : std::round(cfg.total_ffr_cap_mw * w[static_cast<size_t>(jf)] / wsum);
    assigned += f.offered_ffr_cap;
    f.price = 0.0;
    s.ffr.push_back(std::move(f));
  }

  // connected random network: spanning tree plus extra chords
  Network net;
  net.n_buses = cfg.n_buses;
  const double total_cap = std::accumulate(caps.begin(), caps.end(), 0.0);
  const double total_demand = 0.62 * total_cap;
  std::set<std::pair<int, int>> used;
  auto add_line = [&](int a, int b) {
    if (a == b) return false;
    const auto key = std::minmax(a, b);
    if (used.count(key)) return false;
    used.insert(key);
    NetworkLine ln;
    ln.from = a;
    ln.to = b;
    ln.susceptance = 800.0 + 1700.0 * unit(rng);
    ln.flow_limit = (0.25 + 0.25 * unit(rng)) * total_demand;
    net.lines.push_back(ln);
    return true;
  };
  for (int bus = 1; bus < cfg.n_buses; ++bus)
    add_line(bus, static_cast<int>(rng() % static_cast<uint64_t>(bus)));
  const int extra = cfg.n_buses / 2;
  for (int k = 0; k < extra;) {
    const int a = static_cast<int>(rng() % static_cast<uint64_t>(cfg.n_buses));
    const int b = static_cast<int>(rng() % static_cast<uint64_t>(cfg.n_buses));
    if (add_line(a, b)) ++k;
    else ++k;  // accept duplicates as skipped draws so generation always terminates
  }

  net.demand.assign(static_cast<size_t>(cfg.n_buses), 0.0);
  double dsum = 0.0;
  for (auto& d : net.demand) {
    d = 0.2 + unit(rng);
    dsum += d;
  }
  for (auto& d : net.demand) d = d / dsum * total_demand;
  s.network = std::move(net);

  return s;
}

}  // namespace reserveopt
