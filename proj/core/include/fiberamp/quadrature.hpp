#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "fiberamp/config.hpp"

namespace fiberamp {

struct GuidedMode;

/// Tensor quadrature rule over the fiber cross section (disk of radius
/// r_clad): Gauss-Legendre in r on [0, r_core] and [r_core, r_clad], uniform
/// trapezoid in theta. Weights include the polar Jacobian, so
/// sum_q w_q f(r_q, theta_q) approximates the area integral of f. The panel
/// split keeps every node off the index jump at r = r_core.
struct CrossSectionRule {
  std::vector<double> r;       // node radii, m
  std::vector<double> theta;   // node angles, rad
  std::vector<double> weight;  // node areas, m^2
  std::size_t core_count = 0;  // nodes [0, core_count) lie inside the core
  double r_core = 0, r_clad = 0;
  double n_core = 0, n_clad = 0;

  std::size_t size() const { return r.size(); }
  double area() const { return FiberSpec::kPi * r_clad * r_clad; }
  double index_at(std::size_t q) const {
    return r[q] < r_core ? n_core : n_clad;
  }
  template <class F>
  double integrate(F&& f) const {
    double sum = 0;
    for (std::size_t q = 0; q < r.size(); ++q)
      sum += weight[q] * f(r[q], theta[q]);
    return sum;
  }
};

CrossSectionRule build_rule(const FiberSpec& spec, int radial_order,
                            int angular_points);

/// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton iteration on
/// the Legendre recurrence.
void gauss_legendre(int order, std::vector<double>& nodes,
                    std::vector<double>& weights);

/// Power normalization integral Phi = \int (n / mu0 c) |phi|^2 dA.
double mode_norm(const GuidedMode& mode, const CrossSectionRule& rule);

/// Signal irradiance at a transverse point, with all modal cross terms:
/// I_s = (n / mu0 c) |sum_m A_m e^{i beta_m z} phi_m(x,y)|^2.
double signal_irradiance(double x, double y, double z,
                         std::span<const std::complex<double>> amplitudes,
                         std::span<const GuidedMode> modes,
                         const FiberSpec& spec);

}  // namespace fiberamp
