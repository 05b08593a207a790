#pragma once

#include <span>
#include <variant>

#include "fiberamp/config.hpp"

namespace fiberamp {

/// Local exponential gain rates, 1/m.
struct GainSample {
  double signal = 0;  // g_s
  double pump = 0;    // g_p
};

/// nu = I / (hbar omega), photons per m^2 per s.
double photon_flux(double irradiance, double omega);

struct TmPopulations {
  double n0 = 0, n1 = 0, n2 = 0, n3 = 0;  // ions/m^3
  double total() const { return n0 + n1 + n2 + n3; }
};

struct YbPopulations {
  double ground = 0, excited = 0;  // ions/m^3
};

/// Intermediate quantities of the Tm steady-state solution. gamma_3 and
/// gamma_4 diverge as the pump flux vanishes while their products with
/// gamma_1 stay finite, so the products are what the solver consumes;
/// the raw values are reported here for diagnostics (inf at zero pump).
struct TmCoefficients {
  double nu_s = 0, nu_p = 0;
  double psi_abs_s = 0, psi_ems_s = 0, psi_abs_p = 0, psi_ems_p = 0;
  double delta_1 = 0, delta_2 = 0, delta_3 = 0;  // total decay rates, 1/s
  double gamma_0 = 0, gamma_1 = 0, gamma_2 = 0, gamma_3 = 0, gamma_4 = 0;
  double gamma_13 = 0, gamma_14 = 0;  // gamma_1*gamma_3, gamma_1*gamma_4
};

TmCoefficients tm_coefficients(const TmDopantSpec& dopant, double i_s,
                               double i_p, double omega_s, double omega_p);

/// Closed-form steady state of the four-manifold Tm rate equations.
TmPopulations tm_steady_state(double i_s, double i_p,
                              const TmDopantSpec& dopant, double omega_s,
                              double omega_p);

GainSample tm_gain(const TmPopulations& populations,
                   const TmDopantSpec& dopant);

/// Closed-form steady state of the two-level Yb rate equations.
YbPopulations yb_steady_state(double i_s, double i_p,
                              const YbDopantSpec& dopant, double omega_s,
                              double omega_p);

GainSample yb_gain(const YbPopulations& populations,
                   const YbDopantSpec& dopant);

struct OracleOptions {
  int max_iterations = 200;
  double tolerance = 1e-14;  // on the residual, scaled by N_total * max rate
};

/// Independent check path: solves the steady-state rate equations directly by
/// damped Newton with the analytic Jacobian, from the all-ground-state guess.
/// Throws std::runtime_error on non-convergence.
TmPopulations tm_rate_oracle(double i_s, double i_p,
                             const TmDopantSpec& dopant, double omega_s,
                             double omega_p, const OracleOptions& = {});
YbPopulations yb_rate_oracle(double i_s, double i_p,
                             const YbDopantSpec& dopant, double omega_s,
                             double omega_p, const OracleOptions& = {});

/// Gain model bound to the run's wavelengths, with a batch entry point for
/// the integrator's node loop.
class TmGainModel {
 public:
  TmGainModel(const TmDopantSpec& dopant, double omega_s, double omega_p);
  TmPopulations populations(double i_s, double i_p) const;
  GainSample gains(double i_s, double i_p) const;
  void gains_batch(std::span<const double> i_s, double i_p,
                   std::span<double> g_s, std::span<double> g_p) const;
  const TmDopantSpec& dopant() const { return d_; }

 private:
  TmDopantSpec d_;
  double inv_hw_s_, inv_hw_p_;
  double delta_1_, delta_2_, delta_3_;
  double gamma_2_, q21_, r31_, c31_;  // q21 = 1/tau_21 + Gamma_2, r31 = 1/tau_31
};

class YbGainModel {
 public:
  YbGainModel(const YbDopantSpec& dopant, double omega_s, double omega_p);
  YbPopulations populations(double i_s, double i_p) const;
  GainSample gains(double i_s, double i_p) const;
  void gains_batch(std::span<const double> i_s, double i_p,
                   std::span<double> g_s, std::span<double> g_p) const;
  const YbDopantSpec& dopant() const { return d_; }

 private:
  YbDopantSpec d_;
  double inv_hw_s_, inv_hw_p_;
};

/// State-independent gain, for calibration runs and tests.
struct ConstantGain {
  double g_s = 0, g_p = 0;
  GainSample gains(double, double) const { return {g_s, g_p}; }
  void gains_batch(std::span<const double> i_s, double,
                   std::span<double> out_s, std::span<double> out_p) const {
    for (std::size_t q = 0; q < i_s.size(); ++q) {
      out_s[q] = g_s;
      out_p[q] = g_p;
    }
  }
};

using GainModel = std::variant<TmGainModel, YbGainModel, ConstantGain>;

GainModel make_gain_model(const DopantSpec& dopant, const FiberSpec& spec);

}  // namespace fiberamp
