#include <doctest.h>

#include <random>

#include "reserveopt/types.hpp"
#include "test_support.hpp"

using namespace reserveopt;

TEST_CASE("derived deltas at the published ERCOT thresholds") {
  SystemParams p;
  p.omega0 = 60.0;
  p.omega1 = 59.9833;
  p.omega2 = 59.85;
  p.omega_min = 59.4;
  const Deltas d = derived_deltas(p);
  CHECK(d.d1 == doctest::Approx(0.0167).epsilon(1e-9));
  CHECK(d.d2 == doctest::Approx(0.1333).epsilon(1e-9));
  CHECK(d.d3 == doctest::Approx(0.45).epsilon(1e-9));
}

TEST_CASE("derived deltas with a zero dead-band") {
  SystemParams p;
  p.omega1 = p.omega0;  // delta1 = 0
  p.omega2 = 59.85;
  p.omega_min = 59.4;
  const Deltas d = derived_deltas(p);
  CHECK(d.d1 == 0.0);
  CHECK(d.d2 == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(d.d3 == doctest::Approx(0.45).epsilon(1e-12));
}

TEST_CASE("delta telescoping identity on randomized params") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    SystemParams p;
    p.omega0 = 59.0 + 2.0 * u(rng);
    p.omega1 = p.omega0 - 0.001 - 0.05 * u(rng);
    p.omega2 = p.omega1 - 0.01 - 0.3 * u(rng);
    p.omega_min = p.omega2 - 0.01 - 0.8 * u(rng);
    const Deltas d = derived_deltas(p);
    CHECK(std::abs(d.d1 + d.d2 + d.d3 - (p.omega0 - p.omega_min)) < 1e-12);
  }
}

TEST_CASE("validate_scenario accepts the ERCOT-parameter scenario") {
  const Scenario s = testsupport::uniform_fleet(5, 20.0, 100.0);
  CHECK(validate_scenario(s).empty());
}

TEST_CASE("validate_scenario flags a broken frequency ordering") {
  Scenario s = testsupport::uniform_fleet(2, 20.0, 100.0);
  s.params.omega_min = 60.0;
  s.params.omega0 = 60.0;
  const auto v = validate_scenario(s);
  REQUIRE(!v.empty());
  bool found = false;
  for (const auto& msg : v)
    if (msg.find("omega_min < omega2 violated") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("validate_scenario flags a non-convex cost curve") {
  Scenario s = testsupport::uniform_fleet(1, 20.0, 100.0);
  s.generators[0].cost_curve = {{200.0, 30.0}, {500.0, 20.0}};
  const auto v = validate_scenario(s);
  REQUIRE(!v.empty());
  bool found = false;
  for (const auto& msg : v)
    if (msg.find("cost_curve not convex") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("validate_scenario is total over fuzzed fields") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 300; ++k) {
    Scenario s = testsupport::uniform_fleet(3, 20.0, 100.0);
    s.params.omega1 += u(rng);
    s.params.omega2 += u(rng);
    s.params.epsilon = u(rng);
    s.params.contingency_mw = 1000.0 * u(rng);
    s.generators[0].g_min = 50.0 * u(rng);
    s.generators[1].droop_fraction = 0.05 * u(rng);
    s.generators[2].offered_pfr_cap = 10.0 * u(rng);
    (void)validate_scenario(s);  // must not throw on any assignment
  }
  CHECK(true);
}

TEST_CASE("cost_at integrates the marginal schedule") {
  const CostCurve curve = {{100.0, 20.0}, {200.0, 30.0}};
  CHECK(cost_at(curve, 150.0) == doctest::Approx(100.0 * 20.0 + 50.0 * 30.0));
  CHECK(cost_at(curve, 0.0) == 0.0);
  CHECK(cost_at(curve, 250.0) == doctest::Approx(2000.0 + 3000.0 + 50.0 * 30.0));
}

TEST_CASE("allocation invariants are enforced") {
  const Scenario s = testsupport::uniform_fleet(2, 20.0, 100.0);
  Allocation a;
  a.dispatch = {100.0, 100.0};
  a.nominal_pfr = {50.0, 50.0};
  a.available_pfr = {50.0, 50.0};
  a.ffr = {};
  CHECK(validate_allocation(s, a).empty());

  a.available_pfr[0] = 60.0;  // r > R
  CHECK(!validate_allocation(s, a).empty());
  a.available_pfr[0] = 50.0;
  a.dispatch[0] = 480.0;  // G + R > g_max
  CHECK(!validate_allocation(s, a).empty());
}
