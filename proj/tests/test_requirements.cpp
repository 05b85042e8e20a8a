#include <doctest.h>

#include <cmath>
#include <random>

#include "reserveopt/requirements.hpp"
#include "test_support.hpp"

using namespace reserveopt;

namespace {

GeneratorSpec gen500(double droop = 0.05) {
  GeneratorSpec g;
  g.id = "g";
  g.g_max = 500.0;
  g.droop_fraction = droop;
  return g;
}

SystemParams published_ercot() {
  SystemParams p;
  p.omega1 = 59.9833;  // the 4-decimal print; delta1 = 0.0167
  return p;
}

}  // namespace

TEST_CASE("droop constant at 5% droop") {
  const SystemParams p = published_ercot();
  // 500 / (0.05*60 - 0.0167) = 500 / 2.9833
  CHECK(droop_constant(gen500(), p) == doctest::Approx(167.5996).epsilon(1e-5));

  SystemParams nodb = p;
  nodb.omega1 = nodb.omega0;
  CHECK(droop_constant(gen500(), nodb) == doctest::Approx(500.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("droop constant domain error at nu*omega0 == delta1") {
  SystemParams p;
  p.omega1 = 59.0;  // delta1 = 1 Hz
  GeneratorSpec g = gen500(1.0 / 60.0);  // nu*omega0 = 1 Hz exactly
  CHECK_THROWS_AS(droop_constant(g, p), std::domain_error);
}

TEST_CASE("offered PFR capacity limit, exact and approximate") {
  const SystemParams p = published_ercot();
  const GeneratorSpec g = gen500();
  // approx: 500 * 0.6 / 3 = 100, the 0.2*G_bar rule
  CHECK(offered_pfr_cap_limit(g, p, CapMode::approx) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(offered_pfr_cap_limit(g, p, CapMode::approx) ==
        doctest::Approx(0.2 * g.g_max).epsilon(1e-12));
  // exact: 500 * (0.6 - 0.0167) / (3 - 0.0167) = 291.65 / 2.9833 = 97.7609
  CHECK(offered_pfr_cap_limit(g, p, CapMode::exact) == doctest::Approx(97.7609).epsilon(1e-5));

  SystemParams nodb = p;
  nodb.omega1 = nodb.omega0;
  CHECK(offered_pfr_cap_limit(g, nodb, CapMode::exact) ==
        doctest::Approx(offered_pfr_cap_limit(g, nodb, CapMode::approx)).epsilon(1e-14));
}

TEST_CASE("approx offered cap over-estimates the exact one") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    SystemParams p;
    p.omega1 = p.omega0 - 0.001 - 0.05 * u(rng);
    GeneratorSpec g = gen500(0.02 + 0.1 * u(rng));
    g.g_max = 50.0 + 1350.0 * u(rng);
    const double exact = offered_pfr_cap_limit(g, p, CapMode::exact);
    const double approx = offered_pfr_cap_limit(g, p, CapMode::approx);
    CHECK(approx >= exact);
    CHECK(approx > exact);  // delta1 > 0 here, so strictly
  }
}

TEST_CASE("minimum inertia for the deployment-order assumption") {
  SystemParams p;  // exact ERCOT defaults: delta2 = 2/15
  CHECK(min_inertia_for_assumption(p) == doctest::Approx(123750.0).epsilon(1e-9));

  p.epsilon = 0.0;
  CHECK(min_inertia_for_assumption(p) == 0.0);

  p.epsilon = 0.2;
  p.contingency_mw *= 2.0;
  CHECK(min_inertia_for_assumption(p) == doctest::Approx(2.0 * 123750.0).epsilon(1e-9));
}

TEST_CASE("limit function at zero FFR matches its symbolic simplification") {
  SystemParams p;
  p.inertia_mws = 200000.0;
  const Deltas d = derived_deltas(p);
  const double a = p.omega0 * p.epsilon * p.contingency_mw / (2.0 * p.inertia_mws);
  CHECK(a == doctest::Approx(0.0825).epsilon(1e-12));
  const double simplified = 4.0 * p.inertia_mws / p.omega0 * (d.d2 + d.d3 - a) / p.contingency_mw;
  const double h = limit_function_h(p.inertia_mws, 0.0, p);
  CHECK(h == doctest::Approx(simplified).epsilon(1e-12));
  CHECK(h == doctest::Approx(2.4283).epsilon(1e-4));
}

TEST_CASE("limit function at the assumption boundary") {
  SystemParams p;
  const double floor = min_inertia_for_assumption(p);  // 123,750 MW*s
  const Deltas d = derived_deltas(p);
  const double L = p.contingency_mw;
  for (double btil : {0.0, 200.0, 600.0, 1500.0}) {
    const double h = limit_function_h(floor, btil, p);
    CHECK(h > 0.0);
    CHECK(std::isfinite(h));
    // at the boundary a = delta2, so the root argument collapses to d3*L^2
    const double u = btil * std::sqrt(d.d3);
    const double v = std::sqrt(d.d3) * L;
    const double expected = 4.0 * floor / p.omega0 * (u + v) * (u + v) /
                            ((L - btil) * (L + btil) * (L + btil));
    CHECK(h == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("limit function monotone in inertia and FFR on the spot grid") {
  SystemParams p;
  const std::vector<double> inertias = {123750.0, 150000.0, 200000.0, 300000.0};
  const std::vector<double> ffrs = {0.0, 200.0, 400.0, 600.0};
  for (double b : ffrs) {
    double prev = 0.0;
    for (double m : inertias) {
      const double h = limit_function_h(m, b, p);
      CHECK(h > prev);
      prev = h;
    }
  }
  for (double m : inertias) {
    double prev = 0.0;
    for (double b : ffrs) {
      const double h = limit_function_h(m, b, p);
      CHECK(h > prev);
      prev = h;
    }
  }
}

TEST_CASE("limit function convex in the FFR argument") {
  SystemParams p;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const double m = 123750.0 + 250000.0 * u(rng);
    const double lo = u(rng) * 0.5 * p.contingency_mw;
    const double hi = lo + u(rng) * (0.98 * p.contingency_mw - lo);
    const double mid = 0.5 * (lo + hi);
    const double hl = limit_function_h(m, lo, p);
    const double hh = limit_function_h(m, hi, p);
    const double hm = limit_function_h(m, mid, p);
    CHECK(hm <= 0.5 * (hl + hh) + 1e-9 * std::abs(hl + hh));
  }
}

TEST_CASE("limit function root argument stays above d3*L^2 on the domain") {
  SystemParams p;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Deltas d = derived_deltas(p);
  for (int k = 0; k < 1000; ++k) {
    const double m = min_inertia_for_assumption(p) * (1.0 + 3.0 * u(rng));
    const double b = u(rng) * p.contingency_mw;
    const double a = p.omega0 * p.epsilon * p.contingency_mw / (2.0 * m);
    const double arg = (d.d2 + d.d3 - a) * p.contingency_mw * p.contingency_mw -
                       (d.d2 - a) * b * b;
    CHECK(arg >= d.d3 * p.contingency_mw * p.contingency_mw - 1e-9);
  }
}

TEST_CASE("limit function domain errors") {
  SystemParams p;
  CHECK_THROWS_AS(limit_function_h(p.inertia_mws, p.contingency_mw, p), std::domain_error);
  CHECK_THROWS_AS(limit_function_h(p.inertia_mws, 2.0 * p.contingency_mw, p), std::domain_error);
  CHECK_THROWS_AS(limit_function_h(p.inertia_mws, -1.0, p), std::domain_error);
  CHECK_THROWS_AS(limit_function_h(100000.0, 0.0, p), std::domain_error);  // below 123,750
}

TEST_CASE("near-divergence evaluation stays finite and increasing") {
  SystemParams p;
  double prev = 0.0;
  for (double b : {0.99 * p.contingency_mw, 0.999 * p.contingency_mw, 0.99999 * p.contingency_mw,
                   0.9999999 * p.contingency_mw}) {
    const double h = limit_function_h(200000.0, b, p);
    CHECK(std::isfinite(h));
    CHECK(h > prev);
    prev = h;
  }
}

TEST_CASE("rate-based limit") {
  SystemParams p;
  p.inertia_mws = 200000.0;
  GeneratorSpec g = gen500();
  g.governor_ramp = 20.0;
  const double h0 = limit_function_h(p.inertia_mws, 0.0, p);
  CHECK(rate_based_limit(g, p.inertia_mws, 0.0, p) == doctest::Approx(20.0 * h0).epsilon(1e-14));
  CHECK(rate_based_limit(g, p.inertia_mws, 0.0, p) == doctest::Approx(48.566).epsilon(1e-3));

  g.governor_ramp = 0.0;
  CHECK(rate_based_limit(g, p.inertia_mws, 0.0, p) == 0.0);

  g.governor_ramp = 20.0;
  CHECK(rate_based_limit(g, p.inertia_mws, 400.0, p) >
        rate_based_limit(g, p.inertia_mws, 0.0, p));
}

TEST_CASE("proportional limit") {
  SystemParams p;
  GeneratorSpec g = gen500();
  g.ramp_proportionality = 0.2;
  const double h = limit_function_h(200000.0, 300.0, p);
  CHECK(proportional_limit(g, 100.0, 200000.0, 300.0, p) ==
        doctest::Approx(0.2 * 100.0 * h).epsilon(1e-14));
  CHECK(proportional_limit(g, 0.0, 200000.0, 300.0, p) == 0.0);
  // linear in lambda
  GeneratorSpec g3 = g;
  g3.ramp_proportionality = 0.6;
  CHECK(proportional_limit(g3, 100.0, 200000.0, 300.0, p) ==
        doctest::Approx(3.0 * proportional_limit(g, 100.0, 200000.0, 300.0, p)).epsilon(1e-12));
}

TEST_CASE("equivalency table lookups") {
  const EquivalencyTable t = EquivalencyTable::builtin();
  REQUIRE(t.validate().empty());

  auto p120 = equivalency_params(120000.0, t);
  CHECK(p120.ratio == doctest::Approx(2.2));
  CHECK(p120.rfrr_mw == doctest::Approx(5200.0));

  auto p297 = equivalency_params(297000.0, t);
  CHECK(p297.ratio == doctest::Approx(1.0));
  CHECK(p297.rfrr_mw == doctest::Approx(2240.0));

  auto p128 = equivalency_params(128000.0, t);  // midpoint of rows 1-2
  CHECK(p128.ratio == doctest::Approx(2.1));
  CHECK(p128.rfrr_mw == doctest::Approx(4950.0));

  // clamped outside the tabulated range
  CHECK(equivalency_params(60000.0, t).ratio == doctest::Approx(2.2));
  CHECK(equivalency_params(500000.0, t).rfrr_mw == doctest::Approx(2240.0));
}

TEST_CASE("published table ratio column within 0.1 MW") {
  const EquivalencyTable t = EquivalencyTable::builtin();
  const std::vector<double> ratio_col = {2363.6, 2350.0, 2500.0, 2407.1, 2384.6,
                                         2432.0, 2336.3, 2444.4, 2240.0};
  REQUIRE(t.rows.size() == ratio_col.size());
  for (size_t i = 0; i < t.rows.size(); ++i)
    CHECK(std::abs(t.rows[i].rfrr_mw / t.rows[i].ratio - ratio_col[i]) < 0.1);
}

TEST_CASE("equivalency ratio limit") {
  CHECK(equivalency_ratio_limit(2.2, 110.0) == doctest::Approx(50.0));
  CHECK(equivalency_ratio_limit(1.0, 75.0) == doctest::Approx(75.0));
  CHECK(equivalency_ratio_limit(2.0, 0.0) == 0.0);
}

TEST_CASE("general requirement check") {
  Allocation a;
  a.available_pfr = {1200.0, 800.0};
  a.ffr = {500.0, 250.0};
  auto chk = check_general_requirement(a, 2750.0);
  CHECK(chk.satisfied);
  CHECK(chk.slack_mw == doctest::Approx(0.0));

  a.ffr = {400.0, 200.0};
  chk = check_general_requirement(a, 2750.0);
  CHECK(!chk.satisfied);
  CHECK(chk.slack_mw == doctest::Approx(-150.0));

  chk = check_general_requirement(a, 0.0);
  CHECK(chk.satisfied);
}

TEST_CASE("equivalency requirement check against the table rows") {
  const EquivalencyTable t = EquivalencyTable::builtin();
  auto chk = check_equivalency_requirement({3880.0}, {600.0}, 120000.0, t);
  CHECK(chk.satisfied);  // 3880 + 2.2*600 = 5200
  CHECK(chk.slack_mw == doctest::Approx(0.0).epsilon(1e-12));

  chk = check_equivalency_requirement({}, {}, 120000.0, t);
  CHECK(!chk.satisfied);

  chk = check_equivalency_requirement({2240.0}, {}, 297000.0, t);
  CHECK(chk.satisfied);
  CHECK(chk.slack_mw == doctest::Approx(0.0));
}

TEST_CASE("reformulated requirement check") {
  auto chk = check_reformulated_requirement({100.0, 100.0}, {50.0}, 2.0, 150.0);
  CHECK(chk.satisfied);  // boundary: 100 + 50 >= 150
  chk = check_reformulated_requirement({100.0, 100.0}, {49.0}, 2.0, 150.0);
  CHECK(!chk.satisfied);
  // ratio 1 reduces to the general requirement with r = R
  chk = check_reformulated_requirement({70.0, 60.0}, {30.0}, 1.0, 160.0);
  CHECK(chk.satisfied);
  CHECK(chk.slack_mw == doctest::Approx(0.0));
}

TEST_CASE("reformulated requirement matches the closed-form witness r = R/alpha") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const int n = 1 + static_cast<int>(rng() % 6);
    std::vector<double> nominal(static_cast<size_t>(n)), ffr(1 + rng() % 3);
    for (auto& x : nominal) x = 200.0 * u(rng);
    for (auto& x : ffr) x = 150.0 * u(rng);
    const double alpha = 1.0 + 1.5 * u(rng);
    const double contingency = 400.0 * u(rng);
    const bool reported =
        check_reformulated_requirement(nominal, ffr, alpha, contingency).satisfied;
    // witness: the maximal admissible r is exactly R/alpha componentwise
    double max_lhs = std::accumulate(ffr.begin(), ffr.end(), 0.0);
    for (double x : nominal) max_lhs += x / alpha;
    CHECK(reported == (max_lhs >= contingency));
  }
}

TEST_CASE("approximate equivalency ratio") {
  SystemParams p;
  const double h = limit_function_h(200000.0, 300.0, p);
  CHECK(approx_equivalency_ratio(0.2, 200000.0, 300.0, p) ==
        doctest::Approx(1.0 / (0.2 * h)).epsilon(1e-14));
  // doubling h halves alpha: compare two inertia levels with h2 ~ 2*h1
  const double a1 = approx_equivalency_ratio(0.2, 150000.0, 300.0, p);
  const double h1 = limit_function_h(150000.0, 300.0, p);
  CHECK(a1 * h1 == doctest::Approx(1.0 / 0.2).epsilon(1e-12));
}

TEST_CASE("inverse-limit slope is about three times steeper at the inertia floor") {
  SystemParams p;  // L = 2750, the published setting for this comparison
  auto inv_slope = [&](double m) {
    const double db = 1.0;
    const double lo = 1.0 / limit_function_h(m, 300.0 - db, p);
    const double hi = 1.0 / limit_function_h(m, 300.0 + db, p);
    return (hi - lo) / (2.0 * db);
  };
  const double s_low = std::abs(inv_slope(123750.0));
  const double s_high = std::abs(inv_slope(300000.0));
  CHECK(s_low / s_high > 2.5);
  CHECK(s_low / s_high < 3.5);
}
