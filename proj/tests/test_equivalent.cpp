#include <cmath>
#include <numeric>

#include <doctest.h>

#include "fiberamp/equivalent.hpp"
#include "support.hpp"

using namespace fiberamp;

TEST_CASE("dopant transform") {
  const Config tm = testsupport::tm_config();
  SUBCASE("identity at equal lengths") {
    const EquivalentTransform t = transform_dopant(tm.dopant, 10.0, 10.0);
    CHECK(t.scale == 1.0);
    const auto& d = std::get<TmDopantSpec>(t.dopant);
    CHECK(d.n_total == 3e26);
    CHECK(d.kappa_r == 1.17e-21);
  }
  SUBCASE("hundredfold shortening") {
    const EquivalentTransform t = transform_dopant(tm.dopant, 10.0, 0.1);
    const auto& d = std::get<TmDopantSpec>(t.dopant);
    CHECK(d.n_total == doctest::Approx(3e28).epsilon(1e-14));
    CHECK(d.kappa_r == doctest::Approx(1.17e-23).epsilon(1e-14));
    // untouched parameters stay put
    CHECK(d.sigma_abs_p == std::get<TmDopantSpec>(tm.dopant).sigma_abs_p);
    CHECK(d.tau_21 == std::get<TmDopantSpec>(tm.dopant).tau_21);
  }
  SUBCASE("ytterbium scales only the concentration") {
    const Config yb = testsupport::yb_config();
    const EquivalentTransform t = transform_dopant(yb.dopant, 10.0, 0.1);
    const auto& d = std::get<YbDopantSpec>(t.dopant);
    CHECK(d.n_total == doctest::Approx(3e28).epsilon(1e-14));
    CHECK(d.tau == std::get<YbDopantSpec>(yb.dopant).tau);
  }
  SUBCASE("round trip restores the original to machine precision") {
    const EquivalentTransform fwd = transform_dopant(tm.dopant, 10.0, 0.37);
    const auto& d0 = std::get<TmDopantSpec>(tm.dopant);
    TmDopantSpec undone = std::get<TmDopantSpec>(fwd.dopant);
    undone.n_total /= fwd.scale;
    undone.kappa_r *= fwd.scale;
    CHECK(undone.n_total == doctest::Approx(d0.n_total).epsilon(1e-14));
    CHECK(undone.kappa_r == doctest::Approx(d0.kappa_r).epsilon(1e-14));
  }
  SUBCASE("invalid short length") {
    CHECK_THROWS_AS(transform_dopant(tm.dopant, 10.0, 0.0), SimulationError);
    CHECK_THROWS_AS(transform_dopant(tm.dopant, 10.0, 11.0), SimulationError);
  }
}

TEST_CASE("gain scaling identity over random irradiances") {
  const Config tm = testsupport::tm_config();
  const Config yb = testsupport::yb_config();
  for (double scale : {2.0, 10.0, 100.0}) {
    CAPTURE(scale);
    const GainScalingReport rt =
        gain_scaling_check(tm.dopant, tm.fiber, scale, 1000);
    CHECK(rt.max_rel_error < 1e-9);
    const GainScalingReport ry =
        gain_scaling_check(yb.dopant, yb.fiber, scale, 1000);
    CHECK(ry.max_rel_error < 1e-9);
  }
  CHECK(gain_scaling_check(tm.dopant, tm.fiber, 1.0, 50).max_rel_error <
        1e-14);
}

TEST_CASE("launch enumeration") {
  CHECK(enumerate_launches(2, 10).size() == 11);
  CHECK(enumerate_launches(4, 10).size() == 286);
  CHECK(enumerate_launches(1, 10).size() == 1);
  CHECK(enumerate_launches(3, 25).size() == 15);
  for (const auto& f : enumerate_launches(4, 10)) {
    CHECK(f.size() == 4);
    double sum = 0;
    for (double x : f) {
      CHECK(x >= 0.0);
      sum += x;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(enumerate_launches(2, 30), SimulationError);
}

TEST_CASE("comparison bookkeeping on synthetic traces") {
  // original: P(z) = z on [0, 10]; short: constant 0.5 on [0, 1]
  PowerTrace orig;
  orig.mode_count = 1;
  for (int k = 0; k <= 100; ++k) {
    orig.z.push_back(0.1 * k);
    orig.pump.push_back(0.1 * k);
    orig.mode_power.push_back(10.0 - 0.1 * k);
  }
  PowerTrace short_t;
  short_t.mode_count = 1;
  for (int k = 0; k <= 10; ++k) {
    short_t.z.push_back(0.1 * k);
    short_t.pump.push_back(0.5);
    short_t.mode_power.push_back(9.5);
  }
  const ComparisonReport r = compare_on_short_grid(orig, short_t, 10.0);
  CHECK(r.components == 2);
  // pump pullback at z_tilde: 10*z_tilde - 0.5; max |diff| at ends = 9.5
  CHECK(r.max_abs_diff[0] == doctest::Approx(9.5));
  CHECK(r.sign_changes[0] == 1);  // diff crosses zero once
  CHECK(r.rel_error == doctest::Approx(9.5 / 10.0));

  const double eps = epsilon_ratio(orig, short_t, 10.0);
  CHECK(eps == doctest::Approx(9.5 / 10.0));
}

TEST_CASE("single-mode equivalence is exact up to solver error") {
  // With one guided mode the power system is autonomous, so the pullback
  // agrees to discretization error.
  Config cfg = testsupport::light(testsupport::single_mode_config());
  cfg.fiber.length = 2.0;
  auto disc = Discretization::build(cfg.fiber, cfg.numerics);
  EquivalentRunOptions opt;
  opt.short_length = 0.02;
  const EquivalentRun run = run_equivalent(cfg, disc, opt);
  REQUIRE(run.comparison.has_value());
  double pmax = 0;
  for (double p : run.original->mode_power) pmax = std::max(pmax, p);
  CHECK(run.comparison->max_abs_diff[1] < 1e-8 * pmax);
}

TEST_CASE("identity short length gives a vanishing deviation") {
  Config cfg = testsupport::light(testsupport::tm_config());
  cfg.fiber.length = 0.2;
  cfg.fiber.launch_fractions = {0.5, 0.5};
  auto disc = Discretization::build(cfg.fiber, cfg.numerics);
  EquivalentRunOptions opt;
  opt.short_length = 0.2;
  const EquivalentRun run = run_equivalent(cfg, disc, opt);
  CHECK(run.transform.scale == 1.0);
  CHECK(run.comparison->max_abs < 1e-9);
  CHECK(epsilon_ratio(*run.original, run.short_trace, 1.0) < 1e-9);
}

TEST_CASE("epsilon sweep on a miniature configuration") {
  Config cfg = testsupport::light(testsupport::tm_config());
  cfg.fiber.length = 0.2;
  auto disc = Discretization::build(cfg.fiber, cfg.numerics);
  SweepOptions opt;
  opt.pump_powers = {800.0, 1100.0};
  opt.short_lengths = {0.02, 0.2};
  opt.increment_percent = 50;  // 3 launches for two modes
  opt.threads = 2;

  const SweepResult sweep = epsilon_sweep(cfg, disc, opt);
  REQUIRE(sweep.eps.size() == 4);
  for (auto v : sweep.valid) CHECK(v == 1);
  // identity column ~ 0, shortened column larger
  CHECK(sweep.at(0, 1) < 1e-9);
  CHECK(sweep.at(1, 1) < 1e-9);
  CHECK(sweep.at(0, 0) > sweep.at(0, 1));
  CHECK(sweep.at(1, 0) > sweep.at(1, 1));

  SUBCASE("deterministic across thread counts") {
    SweepOptions serial = opt;
    serial.threads = 1;
    const SweepResult again = epsilon_sweep(cfg, disc, serial);
    CHECK(again.eps == sweep.eps);
  }
  SUBCASE("grid validation") {
    SweepOptions bad = opt;
    bad.pump_powers = {};
    CHECK_THROWS_AS(epsilon_sweep(cfg, disc, bad), SimulationError);
    bad = opt;
    bad.pump_powers = {1e9};
    CHECK_THROWS_AS(epsilon_sweep(cfg, disc, bad), SimulationError);
  }
  SUBCASE("failed cells are marked invalid") {
    SweepOptions bad = opt;
    bad.short_lengths = {0.02, 0.5};  // exceeds the 0.2 m fiber
    const SweepResult r = epsilon_sweep(cfg, disc, bad);
    CHECK(r.valid[0] == 1);
    CHECK(r.valid[1] == 0);
    CHECK(!r.errors[1].empty());
  }
}

TEST_CASE("autonomy diagnostics") {
  SUBCASE("single mode is exactly autonomous") {
    Config cfg = testsupport::light(testsupport::single_mode_config());
    cfg.fiber.length = 0.5;
    auto disc = Discretization::build(cfg.fiber, cfg.numerics);
    CmtSystem system(disc, make_gain_model(cfg.dopant, cfg.fiber));
    IntegrateOptions opt;
    opt.length = 0.5;
    opt.store_states = true;
    const PowerTrace trace =
        system.integrate(launch_state(cfg.fiber, 1), opt);
    const AutonomyReport rep = autonomy_diagnostics(trace, system);
    for (std::size_t k = 0; k < rep.z.size(); ++k) {
      CHECK(rep.rho[k] == 0.0);
      CHECK(std::abs(rep.eta_mode[k]) <=
            1e-12 * std::abs(rep.autonomous_mode[k]));
      CHECK(std::abs(rep.eta_pump[k]) <=
            1e-12 * std::abs(rep.autonomous_pump[k]) + 1e-30);
      CHECK(rep.irradiance_l2_rel[k] < 1e-12);
    }
    CHECK(rep.max_eta_over_autonomous < 1e-12);
  }

  SUBCASE("two-mode equal split shows oscillatory coupling") {
    Config cfg = testsupport::light(testsupport::tm_config());
    cfg.fiber.length = 0.05;
    cfg.fiber.launch_fractions = {0.5, 0.5};
    auto disc = Discretization::build(cfg.fiber, cfg.numerics);
    CmtSystem system(disc, make_gain_model(cfg.dopant, cfg.fiber));
    IntegrateOptions opt;
    opt.length = 0.05;
    opt.store_states = true;
    opt.output_stride = 1;
    const PowerTrace trace =
        system.integrate(launch_state(cfg.fiber, 2), opt);
    const AutonomyReport rep = autonomy_diagnostics(trace, system);
    // rho is a rectified beat-scale oscillation: it swings between near-zero
    // minima and pronounced maxima once per beat without crossing zero.
    double max_rho = 0, min_rho = 1e300;
    int peaks = 0;
    for (std::size_t k = 0; k < rep.z.size(); ++k) {
      const double r = std::abs(rep.rho[k * 2]);
      max_rho = std::max(max_rho, r);
      min_rho = std::min(min_rho, r);
      if (k > 0 && k + 1 < rep.z.size() &&
          std::abs(rep.rho[k * 2]) > std::abs(rep.rho[(k - 1) * 2]) &&
          std::abs(rep.rho[k * 2]) > std::abs(rep.rho[(k + 1) * 2]))
        ++peaks;
    }
    CHECK(max_rho > 0.0);
    CHECK(min_rho < 0.2 * max_rho);
    CHECK(peaks > 15);  // ~30 beats over this window
  }
}
