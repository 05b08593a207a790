#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fiberamp/constants.hpp"

namespace fiberamp {

/// Raised for unreadable, malformed, or invariant-violating configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Dopant { Tm, Yb };
enum class SolverKind { RK4, DormandPrince };

/// Fiber geometry, wavelengths, and launch conditions. The cladding index is
/// always derived from (n_core, NA); it is never read from a file.
struct FiberSpec {
  double r_core = 0;               // core radius, m
  double r_clad = 0;               // cladding radius, m
  double n_core = 0;               // core refractive index
  double numerical_aperture = 0;   // NA
  double n_clad = 0;               // derived: sqrt(n_core^2 - NA^2)
  double lambda_s = 0;             // signal vacuum wavelength, m
  double lambda_p = 0;             // pump vacuum wavelength, m
  double length = 0;               // physical fiber length L, m
  Dopant dopant = Dopant::Tm;
  double signal_power = 0;         // P_s0, W
  double pump_power = 0;           // P_p0, W
  std::vector<double> launch_fractions;  // per-mode power fractions at z=0

  double wavenumber_s() const { return 2.0 * kPi / lambda_s; }
  double wavenumber_p() const { return 2.0 * kPi / lambda_p; }
  double omega_s() const { return PhysicalConstants::c * wavenumber_s(); }
  double omega_p() const { return PhysicalConstants::c * wavenumber_p(); }
  double cladding_area() const { return kPi * r_clad * r_clad; }

  static constexpr double kPi = 3.14159265358979323846;
};

/// Thulium four-manifold dopant parameters (cross sections in m^2,
/// lifetimes in s, non-radiative rates in Hz, kappa_r in m^3/s).
struct TmDopantSpec {
  double sigma_abs_p = 0, sigma_ems_p = 0;
  double sigma_abs_s = 0, sigma_ems_s = 0;
  double tau_10 = 0, tau_20 = 0, tau_21 = 0;
  double tau_30 = 0, tau_31 = 0, tau_32 = 0;
  double Gamma_1 = 0, Gamma_2 = 0, Gamma_3 = 0;
  double n_total = 0;   // ions/m^3
  double kappa_r = 0;   // cross-relaxation rate constant, m^3/s
};

/// Ytterbium two-level dopant parameters.
struct YbDopantSpec {
  double sigma_abs_p = 0, sigma_ems_p = 0;
  double sigma_abs_s = 0, sigma_ems_s = 0;
  double tau = 0;       // upper-level radiative lifetime, s
  double n_total = 0;   // ions/m^3
};

using DopantSpec = std::variant<TmDopantSpec, YbDopantSpec>;

/// Discretization choices for the quadrature rule and the ODE solver.
struct NumericsSpec {
  int steps_per_beat = 50;
  int radial_quad_order = 24;    // Gauss points per radial panel
  int angular_quad_points = 64;  // equispaced angular points
  SolverKind solver = SolverKind::RK4;
  std::optional<double> l_tilde;  // equivalent short fiber length, m
  long output_stride = 0;         // 0 = choose automatically (~2000 samples)
};

struct Config {
  FiberSpec fiber;
  DopantSpec dopant;
  NumericsSpec numerics;
};

/// Parse and validate a JSON config file. Throws ConfigError naming the
/// violated invariant on bad input.
Config load_config(const std::string& path);
Config parse_config(const std::string& json_text);

/// Serialize back to the schema accepted by load_config. Round-trips all
/// parameters bit for bit.
std::string config_to_json(const Config& config);
void save_config(const Config& config, const std::string& path);

/// FNV-1a hash of the canonical serialized form; identifies a run's input.
std::uint64_t config_hash(const Config& config);

/// Validate invariants and fill derived fields (n_clad). Throws ConfigError.
void validate(Config& config);

struct WaveNumbers {
  double k_s = 0, k_p = 0;        // rad/m
  double omega_s = 0, omega_p = 0;  // rad/s
};
WaveNumbers derive_wave_numbers(const FiberSpec& spec);

const char* to_string(Dopant d);
const char* to_string(SolverKind s);

}  // namespace fiberamp
