#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "reserveopt/scenario_io.hpp"
#include "test_support.hpp"

using namespace reserveopt;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / "reserveopt_io_test";
    std::filesystem::create_directories(path);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("scenario save/load round-trip is structural identity") {
  const Scenario s = generate_synthetic_case(SyntheticCaseConfig{});
  TempDir tmp;
  const std::string path = tmp.file("case.json");
  save_scenario(s, path);
  const Scenario back = load_scenario(path);
  CHECK(back == s);
}

TEST_CASE("missing keys are reported by name, all at once") {
  const std::string text = R"({
    "params": {"omega1": 59.98333, "omega2": 59.85, "omega_min": 59.4,
               "epsilon": 0.2, "contingency_L": 2500},
    "generators": [{"id": "g0", "bus": 0, "g_max": 100}]
  })";
  try {
    case_from_json(text, "inline");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("params.omega0: missing") != std::string::npos);
    CHECK(msg.find("params.inertia_M: missing") != std::string::npos);
    CHECK(msg.find("generators[0].g_min: missing") != std::string::npos);
  }
}

TEST_CASE("parse errors carry line and column") {
  const std::string text = "{\n  \"params\": {,}\n}";
  try {
    case_from_json(text, "broken.json");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("broken.json:2:") != std::string::npos);
    CHECK(msg.find("parse error") != std::string::npos);
  }
}

TEST_CASE("ERCOT constants in a file produce the expected margins") {
  const std::string text = R"({
    "params": {"omega0": 60.0, "omega1": 59.9833, "omega2": 59.85, "omega_min": 59.4,
               "epsilon": 0.2, "contingency_L": 2750, "inertia_M": 200000},
    "generators": [{"id": "g0", "bus": 0, "g_min": 0, "g_max": 500,
                    "governor_ramp": 20, "offered_pfr_cap": 100}]
  })";
  const CaseFile cf = case_from_json(text, "inline");
  const Deltas d = derived_deltas(cf.scenario.params);
  CHECK(d.d3 == doctest::Approx(0.45).epsilon(1e-9));
  CHECK(!cf.equivalency.has_value());
}

TEST_CASE("a validation failure lists every violation") {
  const std::string text = R"({
    "params": {"omega0": 60.0, "omega1": 60.2, "omega2": 59.85, "omega_min": 59.4,
               "epsilon": -1, "contingency_L": 2750, "inertia_M": 200000},
    "generators": [{"id": "g0", "bus": 0, "g_min": 10, "g_max": 5}]
  })";
  try {
    case_from_json(text, "inline");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("omega1 < omega0 violated") != std::string::npos);
    CHECK(msg.find("epsilon >= 0 violated") != std::string::npos);
    CHECK(msg.find("g_min <= g_max violated") != std::string::npos);
  }
}

TEST_CASE("allocation files round-trip") {
  TempDir tmp;
  Allocation a;
  a.dispatch = {10.0, 20.0};
  a.nominal_pfr = {3.0, 4.0};
  a.available_pfr = {2.5, 4.0};
  a.ffr = {100.0};
  const std::string path = tmp.file("alloc.json");
  save_allocation(a, path);
  const Allocation back = load_allocation(path);
  CHECK(back == a);
}

TEST_CASE("equivalency CSV loads in GW*s and converts") {
  TempDir tmp;
  const std::string path = tmp.file("equiv.csv");
  {
    std::ofstream out(path);
    out << "inertia_gws,rfrr_mw,ratio\n120,5200,2.2\n297,2240,1.0\n";
  }
  const EquivalencyTable t = load_equivalency_csv(path);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].inertia_mws == doctest::Approx(120000.0));
  CHECK(t.rows[1].rfrr_mw == doctest::Approx(2240.0));

  {
    std::ofstream out(path);
    out << "wrong,header,here\n1,2,3\n";
  }
  CHECK_THROWS_AS(load_equivalency_csv(path), IoError);
}

TEST_CASE("bundled equivalency tables are parsed from case files") {
  const std::string text = R"({
    "params": {"omega0": 60.0, "omega1": 59.9833, "omega2": 59.85, "omega_min": 59.4,
               "epsilon": 0.2, "contingency_L": 2750, "inertia_M": 200000},
    "generators": [{"id": "g0", "bus": 0, "g_min": 0, "g_max": 500}],
    "equivalency_table": [[120000, 5200, 2.2], [297000, 2240, 1.0]]
  })";
  const CaseFile cf = case_from_json(text, "inline");
  REQUIRE(cf.equivalency.has_value());
  CHECK(cf.equivalency->rows.size() == 2);
  CHECK(cf.equivalency->rows[0].ratio == doctest::Approx(2.2));
}

TEST_CASE("synthetic generation is deterministic for a fixed seed") {
  SyntheticCaseConfig cfg;
  cfg.seed = 42;
  const Scenario s1 = generate_synthetic_case(cfg);
  const Scenario s2 = generate_synthetic_case(cfg);
  CHECK(s1 == s2);
  CHECK(scenario_to_json(s1) == scenario_to_json(s2));

  cfg.seed = 43;
  CHECK(!(generate_synthetic_case(cfg) == s1));
}

TEST_CASE("synthetic cases satisfy the published test-system conventions") {
  const Scenario s = generate_synthetic_case(SyntheticCaseConfig{});
  CHECK(validate_scenario(s).empty());

  int n_pfr = 0;
  double min_pfr_cap = 1e300, max_nonpfr_cap = 0.0;
  for (const auto& g : s.generators) {
    if (g.offered_pfr_cap > 0.0) {
      ++n_pfr;
      CHECK(g.offered_pfr_cap == doctest::Approx(0.2 * g.g_max).epsilon(1e-12));
      CHECK(g.governor_ramp == doctest::Approx(20.0));
      min_pfr_cap = std::min(min_pfr_cap, g.g_max);
    } else {
      max_nonpfr_cap = std::max(max_nonpfr_cap, g.g_max);
    }
  }
  CHECK(n_pfr == 50);
  CHECK(min_pfr_cap >= max_nonpfr_cap);  // eligibility goes to the largest units

  double ffr_total = 0.0;
  for (const auto& f : s.ffr) ffr_total += f.offered_ffr_cap;
  CHECK(ffr_total == doctest::Approx(600.0).epsilon(1e-12));
  CHECK(s.params.contingency_mw == doctest::Approx(2500.0));
  REQUIRE(s.network.has_value());
  CHECK(s.network->connected());
  // demand leaves headroom above demand plus worst-case reserve needs
  double cap_total = 0.0;
  for (const auto& g : s.generators) cap_total += g.g_max;
  CHECK(s.network->total_demand() < 0.75 * cap_total);
  CHECK(s.network->total_demand() > 0.4 * cap_total);
}

TEST_CASE("generated capacities live in the documented range") {
  const Scenario s = generate_synthetic_case(SyntheticCaseConfig{});
  for (const auto& g : s.generators) {
    CHECK(g.g_max >= 50.0);
    CHECK(g.g_max <= 1400.0);
  }
}
