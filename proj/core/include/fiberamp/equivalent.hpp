#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fiberamp/integrator.hpp"

namespace fiberamp {

/// Parameter transform that realizes the equivalent short fiber: gains scale
/// by L / L_tilde when N_total is scaled up by that factor (and, for Tm,
/// kappa_R is scaled down by it).
struct EquivalentTransform {
  double length = 0;        // original L, m
  double short_length = 0;  // L_tilde, m
  double scale = 1;         // L / L_tilde
  DopantSpec dopant;        // transformed parameters
};

EquivalentTransform transform_dopant(const DopantSpec& dopant, double length,
                                     double short_length);

/// Verifies g(transformed) = scale * g(original) over random irradiance
/// pairs; the algebraic identity the equivalent fiber rests on.
struct GainScalingReport {
  double max_rel_error = 0;
  int samples = 0;
};
GainScalingReport gain_scaling_check(const DopantSpec& dopant,
                                     const FiberSpec& spec, double scale,
                                     int samples, std::uint64_t seed = 20250811);

/// Pointwise comparison of an original trace pulled back through
/// zeta(z_tilde) = z_tilde * scale against the short-fiber trace, evaluated
/// on the short grid. Component 0 is the pump, then one per mode.
struct ComparisonReport {
  std::vector<double> z_short;
  std::vector<double> pulled_back;   // samples x (M+1), row-major
  std::vector<double> short_power;   // samples x (M+1)
  std::vector<double> max_abs_diff;  // per component, W
  std::vector<int> sign_changes;     // per component
  double max_abs = 0;                // W
  double rel_error = 0;              // max_abs / max |P_original|
  int components = 0;
};
ComparisonReport compare_on_short_grid(const PowerTrace& original,
                                       const PowerTrace& short_trace,
                                       double scale);

/// Worst-case relative deviation for one launch, evaluated on the original
/// trace's sample grid with the short trace interpolated at z / scale:
///   max_{l,z} |P_l - P~_l o zeta^{-1}| / max_{l,z} |P_l|.
double epsilon_ratio(const PowerTrace& original, const PowerTrace& short_trace,
                     double scale);

struct EquivalentRunOptions {
  double short_length = 0;
  bool compare = true;  // also run the original fiber and diff
  SolverKind solver = SolverKind::RK4;
  int steps_per_beat = 50;
  long output_stride = 1;  // dense sampling keeps pullback interpolation exact
};

struct EquivalentRun {
  EquivalentTransform transform;
  PowerTrace short_trace;
  std::optional<PowerTrace> original;
  std::optional<ComparisonReport> comparison;
  double seconds_short = 0;
  double seconds_original = 0;
};

EquivalentRun run_equivalent(const Config& config,
                             std::shared_ptr<const Discretization> disc,
                             const EquivalentRunOptions& options);

/// All compositions of 100% into mode_count nonnegative parts at the given
/// increment, as power fractions in deterministic lexicographic order.
std::vector<std::vector<double>> enumerate_launches(int mode_count,
                                                    int increment_percent = 10);

struct SweepOptions {
  std::vector<double> pump_powers;    // W
  std::vector<double> short_lengths;  // m
  int increment_percent = 10;
  SolverKind solver = SolverKind::RK4;
  int steps_per_beat = 50;
  int threads = 0;  // 0 = hardware concurrency
};

/// Worst-case power-deviation grid eps(P_p0, L_tilde): for each cell, the
/// max over enumerated launches of the per-launch epsilon_ratio. Cells whose
/// sub-simulation failed are marked invalid with the error recorded.
struct SweepResult {
  std::vector<double> pump_powers;
  std::vector<double> short_lengths;
  std::vector<double> eps;           // pump-major, size |pp0| x |lt|
  std::vector<std::uint8_t> valid;
  std::vector<std::string> errors;   // empty string when valid
  double at(std::size_t ip, std::size_t il) const {
    return eps[ip * short_lengths.size() + il];
  }
};

SweepResult epsilon_sweep(const Config& config,
                          std::shared_ptr<const Discretization> disc,
                          const SweepOptions& options);

/// A-posteriori size of the non-autonomous terms along a completed run:
/// the L2 distance between the true irradiance and its power-reconstructed
/// surrogate, the oscillatory coupling rho_l, and the eta components, all
/// against the autonomous terms 2 kappa_ll P_l.
struct AutonomyReport {
  std::vector<double> z;
  std::vector<double> irradiance_l2_diff;  // ||I_s - script_I(P)||_L2, W/m
  std::vector<double> irradiance_l2_rel;
  std::vector<double> rho;              // samples x M, W/m
  std::vector<double> eta_mode;         // samples x M, 2(ReK_ll - kappa_ll) P_l
  std::vector<double> autonomous_mode;  // samples x M, 2 kappa_ll P_l
  std::vector<double> eta_pump;         // <g_p(Y) - gamma_p(P)> P_0
  std::vector<double> autonomous_pump;  // <gamma_p(P)> P_0
  int mode_count = 0;
  double max_eta_over_autonomous = 0;
};

AutonomyReport autonomy_diagnostics(const PowerTrace& trace,
                                    const CmtSystem& system);

}  // namespace fiberamp
