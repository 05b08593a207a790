#pragma once

#include <optional>
#include <vector>

#include "fiberamp/config.hpp"
#include "fiberamp/quadrature.hpp"

namespace fiberamp {

/// One guided LP mode of the step-index fiber, in closed form. The profile is
///   phi(r, theta) = core_scale * J_i(u r / r_core) * cos(i theta),  r < r_core
///   phi(r, theta) = clad_scale * K_i(w r / r_core) * cos(i theta),  r >= r_core
/// continuous at r = r_core by construction. After normalization the power
/// integral Phi = \int (n / mu0 c) |phi|^2 dA equals 1, so a mode carrying
/// amplitude a carries power |a|^2.
struct GuidedMode {
  int azimuthal = 0;      // i
  int radial = 0;         // j (1-based among the roots for this i)
  double beta = 0;        // propagation constant, rad/m
  double u = 0;           // core transverse parameter (root X_ij)
  double w = 0;           // cladding decay parameter, sqrt(V^2 - u^2)
  double core_scale = 0;  // K_i(w) times the normalization factor
  double clad_scale = 0;  // J_i(u) times the normalization factor
  double norm = 0;        // Phi after normalization (== 1 up to quadrature)
  double r_core = 0;

  double radial_profile(double r) const;
  double value(double r, double theta) const;
  std::string name() const;  // "LP01", "LP11", ...
};

struct ModeFamily {
  std::vector<GuidedMode> modes;  // LP01 first, then ascending cutoff
  double v = 0;                   // normalized frequency
  std::optional<double> beat_length;  // m; absent when only one mode
  int count() const { return static_cast<int>(modes.size()); }
};

/// V = k_s * r_core * NA; bounds the characteristic roots.
double normalized_frequency(const FiberSpec& spec);

/// Left-hand side of the weakly-guiding characteristic equation,
///   u J_{i-1}(u) K_i(w) + w J_i(u) K_{i-1}(w),  w = sqrt(V^2 - u^2).
double characteristic_fn(int azimuthal, double u, double v);

/// All roots u in (0, V), ascending, each bisected to |du| < 1e-12 V.
std::vector<double> characteristic_roots(int azimuthal, double v);

/// Assemble the mode for a characteristic root (unnormalized; norm holds the
/// raw Phi until normalize_against is applied). Throws std::domain_error if
/// the root is not guided.
GuidedMode build_mode(int azimuthal, int radial_index, double u,
                      const FiberSpec& spec);

/// Lambda = 2 pi / max |beta_l - beta_m|; requires at least two modes.
double beat_length(const std::vector<GuidedMode>& modes);

/// Find all guided modes at the signal wavelength, normalize them against the
/// rule so that Phi_l = 1, and order them LP01 first then ascending cutoff.
ModeFamily solve_modes(const FiberSpec& spec, const CrossSectionRule& rule);

}  // namespace fiberamp
