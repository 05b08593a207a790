#include <cmath>
#include <complex>

#include <doctest.h>

#include "fiberamp/integrator.hpp"
#include "fiberamp/modes.hpp"
#include "fiberamp/quadrature.hpp"
#include "support.hpp"

using namespace fiberamp;

TEST_CASE("rule integrates constants to the disk area") {
  const Config cfg = testsupport::tm_config();
  const CrossSectionRule rule = build_rule(cfg.fiber, 24, 64);
  double total = 0;
  for (double w : rule.weight) {
    CHECK(w > 0);
    total += w;
  }
  const double area = FiberSpec::kPi * 2e-4 * 2e-4;
  CHECK(total == doctest::Approx(area).epsilon(1e-12));
  CHECK(area == doctest::Approx(1.2566e-7).epsilon(1e-4));
  // no node sits on the index discontinuity
  for (double r : rule.r) CHECK(r != cfg.fiber.r_core);
  CHECK(rule.core_count == 24u * 64u);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    if (q < rule.core_count)
      CHECK(rule.r[q] < cfg.fiber.r_core);
    else
      CHECK(rule.r[q] > cfg.fiber.r_core);
  }
}

TEST_CASE("angular symmetry cancels cos(theta)") {
  const CrossSectionRule rule = build_rule(testsupport::tm_config().fiber, 8, 16);
  const double v =
      rule.integrate([](double, double theta) { return std::cos(theta); });
  CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("gauss-legendre nodes are exact for polynomials") {
  std::vector<double> x, w;
  gauss_legendre(6, x, w);
  double sum = 0, quad = 0;
  for (int i = 0; i < 6; ++i) {
    sum += w[i];
    quad += w[i] * std::pow(x[i], 10);
  }
  CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(quad == doctest::Approx(2.0 / 11.0).epsilon(1e-14));  // deg 10 exact at n=6
}

TEST_CASE("mode norm converges under refinement and normalizes to one") {
  const Config cfg = testsupport::tm_config();
  const CrossSectionRule rule = build_rule(cfg.fiber, 24, 64);
  const CrossSectionRule fine = build_rule(cfg.fiber, 96, 256);

  // raw (unnormalized) LP01: compare the norm against a 4x-refined rule
  const auto roots = characteristic_roots(0, normalized_frequency(cfg.fiber));
  GuidedMode raw = build_mode(0, 1, roots[0], cfg.fiber);
  const double coarse_norm = mode_norm(raw, rule);
  const double fine_norm = mode_norm(raw, fine);
  CHECK(coarse_norm ==
        doctest::Approx(fine_norm).epsilon(1e-10));

  const ModeFamily fam = solve_modes(cfg.fiber, rule);
  for (const GuidedMode& m : fam.modes)
    CHECK(mode_norm(m, rule) == doctest::Approx(1.0).epsilon(1e-10));

  // zero field integrates to zero
  GuidedMode zero = fam.modes[0];
  zero.core_scale = zero.clad_scale = 0.0;
  CHECK(mode_norm(zero, rule) == 0.0);
}

TEST_CASE("modes of different azimuthal order have vanishing overlap") {
  const Config cfg = testsupport::yb_config();
  const CrossSectionRule fine = build_rule(cfg.fiber, 48, 128);
  const ModeFamily fam = solve_modes(cfg.fiber, fine);
  const double inv_mu0c = 1.0 / (PhysicalConstants::mu0 * PhysicalConstants::c);
  for (int a = 0; a < fam.count(); ++a) {
    for (int b = a + 1; b < fam.count(); ++b) {
      // Angular orthogonality applies to distinct azimuthal orders; modes of
      // the same order (LP01/LP02) are only radially near-orthogonal.
      if (fam.modes[a].azimuthal == fam.modes[b].azimuthal) continue;
      double overlap = 0;
      for (std::size_t q = 0; q < fine.size(); ++q)
        overlap += fine.weight[q] * fine.index_at(q) * inv_mu0c *
                   fam.modes[a].value(fine.r[q], fine.theta[q]) *
                   fam.modes[b].value(fine.r[q], fine.theta[q]);
      CAPTURE(a);
      CAPTURE(b);
      CHECK(std::abs(overlap) < 1e-10);
    }
  }
}

TEST_CASE("signal irradiance") {
  const Config cfg = testsupport::tm_config();
  const CrossSectionRule rule = build_rule(cfg.fiber, 24, 64);
  const ModeFamily fam = solve_modes(cfg.fiber, rule);

  SUBCASE("zero amplitudes give zero everywhere") {
    const std::vector<std::complex<double>> a(fam.count(), 0.0);
    for (double x : {0.0, 5e-6, 5e-5})
      CHECK(signal_irradiance(x, 1e-6, 0.37, a, fam.modes, cfg.fiber) == 0.0);
  }

  SUBCASE("single unit-power mode integrates back to its power") {
    const double p = 17.0;
    std::vector<std::complex<double>> a = {std::sqrt(p), 0.0};
    const double got = rule.integrate([&](double r, double theta) {
      return signal_irradiance(r * std::cos(theta), r * std::sin(theta), 0.0,
                               a, fam.modes, cfg.fiber);
    });
    CHECK(got == doctest::Approx(p).epsilon(1e-9));
  }

  SUBCASE("cross terms integrate to near zero at any phase slip") {
    // equal power in both modes; pick z so the relative phase is pi
    const double dbeta = fam.modes[0].beta - fam.modes[1].beta;
    const double z = FiberSpec::kPi / std::abs(dbeta);
    std::vector<std::complex<double>> a = {std::sqrt(10.0), std::sqrt(10.0)};
    const CrossSectionRule fine = build_rule(cfg.fiber, 48, 128);
    const double got = fine.integrate([&](double r, double theta) {
      return signal_irradiance(r * std::cos(theta), r * std::sin(theta), z, a,
                               fam.modes, cfg.fiber);
    });
    CHECK(got == doctest::Approx(20.0).epsilon(1e-8));
  }
}

TEST_CASE("quadrature convergence gate for the reference configurations") {
  // Doubling the radial order changes the integrated signal irradiance of the
  // launch field by less than 1e-9 relative.
  for (bool tm : {true, false}) {
    const Config cfg = tm ? testsupport::tm_config() : testsupport::yb_config();
    CAPTURE(tm);
    auto integrated_power = [&](int radial) {
      const CrossSectionRule rule =
          build_rule(cfg.fiber, radial, cfg.numerics.angular_quad_points);
      const ModeFamily fam = solve_modes(cfg.fiber, rule);
      std::vector<std::complex<double>> a(fam.count());
      for (int l = 0; l < fam.count(); ++l)
        a[l] = std::sqrt(cfg.fiber.launch_fractions[l] * cfg.fiber.signal_power);
      return rule.integrate([&](double r, double theta) {
        return signal_irradiance(r * std::cos(theta), r * std::sin(theta),
                                 0.0, a, fam.modes, cfg.fiber);
      });
    };
    const double base = integrated_power(cfg.numerics.radial_quad_order);
    const double refined = integrated_power(2 * cfg.numerics.radial_quad_order);
    CHECK(std::abs(base - refined) / std::abs(refined) < 1e-9);
  }
}
