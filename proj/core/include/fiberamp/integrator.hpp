#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fiberamp/config.hpp"
#include "fiberamp/gain.hpp"
#include "fiberamp/modes.hpp"
#include "fiberamp/quadrature.hpp"

namespace fiberamp {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pump irradiance plus complex modal amplitudes at a position z. Under the
/// unit-norm mode convention, |amplitudes[l]|^2 is the power in mode l.
struct StateVector {
  double pump_irradiance = 0;  // I_p, W/m^2
  std::vector<std::complex<double>> amplitudes;
  double z = 0;
};

struct CouplingMatrix {
  int size = 0;
  std::vector<std::complex<double>> k;  // row-major (l, m), 1/m
  double mean_pump_gain = 0;            // <g_p>, 1/m
  std::complex<double> at(int l, int m) const {
    return k[static_cast<std::size_t>(l) * size + m];
  }
};

/// Everything precomputable once per (fiber, numerics) pair: the quadrature
/// rule, the normalized mode family, and per-node tables used by the RHS.
/// Immutable; share freely across concurrent integrations.
struct Discretization {
  FiberSpec fiber;
  CrossSectionRule rule;
  ModeFamily family;
  std::vector<double> mode_values;        // M x Q, phi_l at each node
  /// n w phi_l phi_m for l <= m, restricted to the core nodes: the dopant is
  /// confined to the core, so gain-weighted integrals vanish outside it.
  std::vector<double> pair_products;      // npairs x core_count
  std::vector<double> irradiance_factor;  // n / (mu0 c) per node
  std::vector<double> inv_l2_norm;        // 1 / \int |phi_l|^2 dA per mode

  static std::shared_ptr<const Discretization> build(
      const FiberSpec& spec, const NumericsSpec& numerics);

  std::size_t nodes() const { return rule.size(); }
  int mode_count() const { return family.count(); }
  std::size_t pair_index(int l, int m) const;  // l <= m
};

/// Sampled per-mode powers along the fiber, the primary observable.
struct PowerTrace {
  std::vector<double> z;           // m
  std::vector<double> pump;        // W
  std::vector<double> mode_power;  // samples x M, row-major, W
  std::vector<double> signal;      // W (empty unless requested)
  std::vector<double> states;      // samples x (1+2M) (empty unless requested)
  int mode_count = 0;
  long total_steps = 0;
  double step_size = 0;            // m
  double max_embedded_error = 0;   // Dormand-Prince only; recorded, unused

  std::size_t samples() const { return z.size(); }
  double mode_at(std::size_t sample, int l) const {
    return mode_power[sample * mode_count + l];
  }
  bool has_states() const { return !states.empty(); }
  StateVector state_at(std::size_t sample) const;
};

struct IntegrateOptions {
  double length = 0;  // m; 0 means the full fiber length
  SolverKind solver = SolverKind::RK4;
  int steps_per_beat = 50;
  /// Overrides the beat-length rule. Required when only one mode is guided
  /// (the rule is then undefined); defaults to 1e4 steps per meter there.
  std::optional<long> explicit_steps;
  long output_stride = 0;  // 0 = aim for ~2000 samples
  bool store_states = false;
  bool compute_signal = false;
};

/// Number of fixed steps the beat-length rule prescribes for a given length.
long prescribed_steps(const ModeFamily& family, double length,
                      int steps_per_beat,
                      std::optional<long> explicit_steps = {});

/// Launch state: uniform pump irradiance from P_p0 over the cladding disk,
/// real nonnegative amplitudes A_l = sqrt(f_l P_s0).
StateVector launch_state(const FiberSpec& spec, int mode_count);

/// The coupled-mode ODE system for one fiber: assembles coupling
/// coefficients from the gain model and integrates along z.
class CmtSystem {
 public:
  CmtSystem(std::shared_ptr<const Discretization> disc, GainModel gain);

  const Discretization& disc() const { return *disc_; }
  const GainModel& gain() const { return gain_; }
  int mode_count() const { return disc_->mode_count(); }

  /// K_lm(Y) and <g_p>(Y) at position z.
  CouplingMatrix coupling_matrix(double z, const StateVector& state) const;

  /// dY/dz: dI_p/dz = <g_p> I_p and
  /// dA_l/dz = sum_m e^{i(beta_m - beta_l) z} K_lm A_m.
  StateVector rhs(double z, const StateVector& state) const;

  /// Total signal power \int I_s dA, cross terms included.
  double signal_power(double z, const StateVector& state) const;

  PowerTrace integrate(const StateVector& initial,
                       const IntegrateOptions& options) const;

 private:
  struct Workspace;
  void eval_rhs(double z, const double* y, double* dy, Workspace& ws) const;
  double signal_power_flat(double z, const double* y, Workspace& ws) const;

  std::shared_ptr<const Discretization> disc_;
  GainModel gain_;
  std::vector<double> beta_rel_;  // beta_l - beta_1 (phase bookkeeping)
  std::vector<double> k_pref_;    // k_s / (2 beta_l) / ||phi_l||_{L2}^2
};

/// Residual of the per-mode power equation
///   dP_l/dz = 2 Re(K_ll) P_l + rho_l(Y)
/// evaluated by finite differences of a trace that stored its states. The
/// maximum shrinks at the finite-difference rate under step refinement.
struct OdeCheckReport {
  double max_residual = 0;         // W/m
  std::vector<double> per_mode;    // max |residual| per mode
};
OdeCheckReport per_mode_power_ode_check(const PowerTrace& trace,
                                        const CmtSystem& system);

}  // namespace fiberamp
