#include "fiberamp/quadrature.hpp"

#include <cmath>

#include "fiberamp/modes.hpp"

namespace fiberamp {

void gauss_legendre(int order, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  nodes.assign(order, 0.0);
  weights.assign(order, 0.0);
  const double pi = FiberSpec::kPi;
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (order + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      // Legendre P_order(x) and derivative by upward recurrence.
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[order - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[order - 1 - i] = w;
  }
}

CrossSectionRule build_rule(const FiberSpec& spec, int radial_order,
                            int angular_points) {
  if (radial_order < 4 || angular_points < 4)
    throw ConfigError("quadrature orders must be >= 4");
  CrossSectionRule rule;
  rule.r_core = spec.r_core;
  rule.r_clad = spec.r_clad;
  rule.n_core = spec.n_core;
  rule.n_clad = spec.n_clad;

  std::vector<double> x, w;
  gauss_legendre(radial_order, x, w);

  std::vector<double> radii, rweights;
  const double panels[2][2] = {{0.0, spec.r_core}, {spec.r_core, spec.r_clad}};
  for (const auto& p : panels) {
    const double half = 0.5 * (p[1] - p[0]);
    const double mid = 0.5 * (p[1] + p[0]);
    for (int i = 0; i < radial_order; ++i) {
      const double r = mid + half * x[i];
      radii.push_back(r);
      rweights.push_back(half * w[i] * r);  // polar Jacobian
    }
  }

  const double dtheta = 2.0 * FiberSpec::kPi / angular_points;
  rule.r.reserve(radii.size() * angular_points);
  rule.theta.reserve(radii.size() * angular_points);
  rule.weight.reserve(radii.size() * angular_points);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    for (int j = 0; j < angular_points; ++j) {
      rule.r.push_back(radii[i]);
      rule.theta.push_back(j * dtheta);
      rule.weight.push_back(rweights[i] * dtheta);
    }
  }
  // Core-panel nodes come first; the dopant (and hence the gain) lives there.
  rule.core_count =
      static_cast<std::size_t>(radial_order) * angular_points;
  return rule;
}

double mode_norm(const GuidedMode& mode, const CrossSectionRule& rule) {
  const double inv_mu0c = 1.0 / (PhysicalConstants::mu0 * PhysicalConstants::c);
  double sum = 0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double phi = mode.value(rule.r[q], rule.theta[q]);
    sum += rule.weight[q] * rule.index_at(q) * inv_mu0c * phi * phi;
  }
  return sum;
}

double signal_irradiance(double x, double y, double z,
                         std::span<const std::complex<double>> amplitudes,
                         std::span<const GuidedMode> modes,
                         const FiberSpec& spec) {
  const double r = std::hypot(x, y);
  const double theta = std::atan2(y, x);
  std::complex<double> field{0.0, 0.0};
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const double phase = modes[m].beta * z;
    field += amplitudes[m] * std::complex<double>{std::cos(phase),
                                                  std::sin(phase)} *
             modes[m].value(r, theta);
  }
  const double n = r < spec.r_core ? spec.n_core : spec.n_clad;
  return n / (PhysicalConstants::mu0 * PhysicalConstants::c) *
         std::norm(field);
}

}  // namespace fiberamp
