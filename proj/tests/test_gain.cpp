#include <cmath>
#include <random>

#include <doctest.h>

#include "fiberamp/gain.hpp"
#include "support.hpp"

using namespace fiberamp;

namespace {

struct TmSetup {
  TmDopantSpec d;
  double omega_s, omega_p;
};

TmSetup tm_setup() {
  const Config cfg = testsupport::tm_config();
  return {std::get<TmDopantSpec>(cfg.dopant), cfg.fiber.omega_s(),
          cfg.fiber.omega_p()};
}

struct YbSetup {
  YbDopantSpec d;
  double omega_s, omega_p;
};

YbSetup yb_setup() {
  const Config cfg = testsupport::yb_config();
  return {std::get<YbDopantSpec>(cfg.dopant), cfg.fiber.omega_s(),
          cfg.fiber.omega_p()};
}

constexpr double kNominalIp = 8.7535218700542435e9;  // 1100 W over the cladding

}  // namespace

TEST_CASE("photon flux") {
  CHECK(photon_flux(0.0, 2e15) == 0.0);
  const double omega = 3.1e15;
  CHECK(photon_flux(PhysicalConstants::hbar * omega, omega) ==
        doctest::Approx(1.0).epsilon(1e-15));
  const double omega_p = 2.3753487607930054e15;  // 793 nm
  CHECK(photon_flux(kNominalIp, omega_p) ==
        doctest::Approx(3.494453585142848e28).epsilon(1e-12));
}

TEST_CASE("tm steady state in the dark is all ground state") {
  const auto [d, ws, wp] = tm_setup();
  const TmPopulations p = tm_steady_state(0.0, 0.0, d, ws, wp);
  CHECK(p.n0 == doctest::Approx(d.n_total).epsilon(1e-14));
  CHECK(p.n1 == 0.0);
  CHECK(p.n2 == 0.0);
  CHECK(p.n3 == 0.0);
}

TEST_CASE("tm closed form matches the frozen pump-only fixture") {
  // Independently computed by a scientific-python nonlinear solve.
  const auto [d, ws, wp] = tm_setup();
  const TmPopulations p = tm_steady_state(0.0, kNominalIp, d, ws, wp);
  CHECK(p.n0 == doctest::Approx(3.46724724e25).epsilon(1e-7));
  CHECK(p.n1 == doctest::Approx(2.60875650e26).epsilon(1e-7));
  CHECK(p.n2 == doctest::Approx(1.22243305e22).epsilon(1e-7));
  CHECK(p.n3 == doctest::Approx(4.43965374e24).epsilon(1e-7));
}

TEST_CASE("tm closed form agrees with the rate-equation oracle") {
  const auto [d, ws, wp] = tm_setup();
  const double core_is = 30.0 / (FiberSpec::kPi * 1.25e-5 * 1.25e-5);
  for (auto [is, ip] : {std::pair{0.0, kNominalIp},
                        std::pair{core_is, kNominalIp},
                        std::pair{core_is, 0.0},
                        std::pair{1e3, 1e3}}) {
    CAPTURE(is);
    CAPTURE(ip);
    const TmPopulations c = tm_steady_state(is, ip, d, ws, wp);
    const TmPopulations o = tm_rate_oracle(is, ip, d, ws, wp);
    CHECK(std::abs(c.n0 - o.n0) / d.n_total < 1e-10);
    CHECK(std::abs(c.n1 - o.n1) / d.n_total < 1e-10);
    CHECK(std::abs(c.n2 - o.n2) / d.n_total < 1e-10);
    CHECK(std::abs(c.n3 - o.n3) / d.n_total < 1e-10);
  }
}

TEST_CASE("oracle basics") {
  const auto [d, ws, wp] = tm_setup();
  const TmPopulations p = tm_rate_oracle(0.0, 0.0, d, ws, wp);
  CHECK(p.n0 == doctest::Approx(d.n_total).epsilon(1e-14));
  const TmPopulations q = tm_rate_oracle(4.2e11, 7.7e9, d, ws, wp);
  CHECK(q.total() == doctest::Approx(d.n_total).epsilon(1e-10));
}

TEST_CASE("closed form vs oracle over random irradiance pairs") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> e(0.0, 14.0);
  const auto tm = tm_setup();
  const auto yb = yb_setup();
  double worst = 0;
  for (int k = 0; k < 1000; ++k) {
    const double is = std::pow(10.0, e(rng));
    const double ip = std::pow(10.0, e(rng));
    {
      const TmPopulations c =
          tm_steady_state(is, ip, tm.d, tm.omega_s, tm.omega_p);
      const TmPopulations o =
          tm_rate_oracle(is, ip, tm.d, tm.omega_s, tm.omega_p);
      worst = std::max(worst, std::abs(c.n0 - o.n0) / tm.d.n_total);
      worst = std::max(worst, std::abs(c.n1 - o.n1) / tm.d.n_total);
      worst = std::max(worst, std::abs(c.n2 - o.n2) / tm.d.n_total);
      worst = std::max(worst, std::abs(c.n3 - o.n3) / tm.d.n_total);
    }
    {
      const YbPopulations c =
          yb_steady_state(is, ip, yb.d, yb.omega_s, yb.omega_p);
      const YbPopulations o =
          yb_rate_oracle(is, ip, yb.d, yb.omega_s, yb.omega_p);
      worst = std::max(worst, std::abs(c.ground - o.ground) / yb.d.n_total);
      worst = std::max(worst, std::abs(c.excited - o.excited) / yb.d.n_total);
    }
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("population conservation and nonnegativity property") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto tm = tm_setup();
  const auto yb = yb_setup();
  for (int k = 0; k < 2000; ++k) {
    const double is = u(rng) < 0.1 ? 0.0 : std::pow(10.0, 14.0 * u(rng));
    const double ip = u(rng) < 0.1 ? 0.0 : std::pow(10.0, 14.0 * u(rng));
    const TmPopulations p = tm_steady_state(is, ip, tm.d, tm.omega_s, tm.omega_p);
    CHECK(p.n0 >= 0.0);
    CHECK(p.n1 >= 0.0);
    CHECK(p.n2 >= 0.0);
    CHECK(p.n3 >= 0.0);
    CHECK(p.total() == doctest::Approx(tm.d.n_total).epsilon(1e-8));
    const YbPopulations y = yb_steady_state(is, ip, yb.d, yb.omega_s, yb.omega_p);
    CHECK(y.ground >= 0.0);
    CHECK(y.excited >= 0.0);
    CHECK(y.ground + y.excited ==
          doctest::Approx(yb.d.n_total).epsilon(1e-12));
  }
}

TEST_CASE("tm gain expressions") {
  const auto [d, ws, wp] = tm_setup();
  SUBCASE("all ions in the ground state absorb") {
    const GainSample g = tm_gain({d.n_total, 0, 0, 0}, d);
    CHECK(g.signal == doctest::Approx(-d.sigma_abs_s * d.n_total));
    CHECK(g.pump == doctest::Approx(-d.sigma_abs_p * d.n_total));
  }
  SUBCASE("full inversion of manifold 1") {
    const GainSample g = tm_gain({0, d.n_total, 0, 0}, d);
    CHECK(g.signal == doctest::Approx(d.sigma_ems_s * d.n_total));
  }
  SUBCASE("zero pump emission cross section keeps pump gain nonpositive") {
    REQUIRE(d.sigma_ems_p == 0.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> e(0.0, 14.0);
    for (int k = 0; k < 200; ++k) {
      const TmPopulations p = tm_steady_state(std::pow(10.0, e(rng)),
                                              std::pow(10.0, e(rng)), d, ws, wp);
      CHECK(tm_gain(p, d).pump <= 0.0);
    }
  }
}

TEST_CASE("yb steady state") {
  const auto [d, ws, wp] = yb_setup();
  SUBCASE("dark fiber has no excited ions") {
    const YbPopulations p = yb_steady_state(0.0, 0.0, d, ws, wp);
    CHECK(p.excited == 0.0);
    CHECK(p.ground == d.n_total);
  }
  SUBCASE("strong-pump limit approaches the cross-section ratio") {
    const double ip = 1e15;
    const YbPopulations p = yb_steady_state(0.0, ip, d, ws, wp);
    const double limit =
        d.n_total * d.sigma_abs_p / (d.sigma_abs_p + d.sigma_ems_p);
    CHECK(p.excited == doctest::Approx(limit).epsilon(1e-4));
  }
  SUBCASE("excited population is nondecreasing in pump irradiance") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> e(0.0, 13.0);
    for (int k = 0; k < 300; ++k) {
      const double is = std::pow(10.0, e(rng));
      const double ip = std::pow(10.0, e(rng));
      const double up = ip * 1.5;
      CHECK(yb_steady_state(is, up, d, ws, wp).excited >=
            yb_steady_state(is, ip, d, ws, wp).excited - 1e-9 * d.n_total);
    }
  }
  SUBCASE("transparency population nulls the gain") {
    const double frac = d.sigma_abs_s / (d.sigma_abs_s + d.sigma_ems_s);
    const YbPopulations p{d.n_total * (1 - frac), d.n_total * frac};
    CHECK(std::abs(yb_gain(p, d).signal) < 1e-12 * d.sigma_ems_s * d.n_total);
  }
  SUBCASE("strong pump amplifies the signal") {
    const YbPopulations p = yb_steady_state(1e6, 1e10, d, ws, wp);
    CHECK(yb_gain(p, d).signal > 0.0);
  }
}

TEST_CASE("gain is linear in a uniform population scaling") {
  const auto tm = tm_setup();
  const auto yb = yb_setup();
  const TmPopulations p = tm_steady_state(3e10, 8e9, tm.d, tm.omega_s,
                                          tm.omega_p);
  for (double lambda : {2.0, 17.5, 100.0}) {
    const TmPopulations scaled{lambda * p.n0, lambda * p.n1, lambda * p.n2,
                               lambda * p.n3};
    CHECK(tm_gain(scaled, tm.d).signal ==
          doctest::Approx(lambda * tm_gain(p, tm.d).signal).epsilon(1e-12));
    CHECK(tm_gain(scaled, tm.d).pump ==
          doctest::Approx(lambda * tm_gain(p, tm.d).pump).epsilon(1e-12));
    const YbPopulations y =
        yb_steady_state(3e10, 8e9, yb.d, yb.omega_s, yb.omega_p);
    const YbPopulations ys{lambda * y.ground, lambda * y.excited};
    CHECK(yb_gain(ys, yb.d).signal ==
          doctest::Approx(lambda * yb_gain(y, yb.d).signal).epsilon(1e-12));
  }
}

TEST_CASE("coefficient bundle stays finite where it should") {
  const auto [d, ws, wp] = tm_setup();
  const TmCoefficients c = tm_coefficients(d, 1e9, 1e9, ws, wp);
  CHECK(c.delta_1 == doctest::Approx(1.0 / d.tau_10 + d.Gamma_1));
  CHECK(c.delta_3 ==
        doctest::Approx(1.0 / d.tau_32 + 1.0 / d.tau_31 + 1.0 / d.tau_30 +
                        d.Gamma_3));
  CHECK(c.gamma_13 == doctest::Approx(c.gamma_1 * c.gamma_3));
  // at zero pump the products stay finite while gamma_3 itself diverges
  const TmCoefficients z = tm_coefficients(d, 1e9, 0.0, ws, wp);
  CHECK(std::isfinite(z.gamma_13));
  CHECK(std::isfinite(z.gamma_14));
  CHECK(std::isinf(z.gamma_3));
}

TEST_CASE("batch gain entry point matches the scalar one") {
  const Config cfg = testsupport::tm_config();
  const TmGainModel model(std::get<TmDopantSpec>(cfg.dopant),
                          cfg.fiber.omega_s(), cfg.fiber.omega_p());
  std::vector<double> is = {0.0, 1e6, 3.3e9, 8.1e11, 2e13};
  std::vector<double> gs(is.size()), gp(is.size());
  model.gains_batch(is, kNominalIp, gs, gp);
  for (std::size_t q = 0; q < is.size(); ++q) {
    const GainSample g = model.gains(is[q], kNominalIp);
    CHECK(gs[q] == doctest::Approx(g.signal).epsilon(1e-14));
    CHECK(gp[q] == doctest::Approx(g.pump).epsilon(1e-14));
  }
}
