#include "fiberamp/modes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fiberamp/bessel.hpp"

namespace fiberamp {

double GuidedMode::radial_profile(double r) const {
  if (r < r_core) return core_scale * bessel_j(azimuthal, u * r / r_core);
  return clad_scale * bessel_k(azimuthal, w * r / r_core);
}

double GuidedMode::value(double r, double theta) const {
  const double rad = radial_profile(r);
  return azimuthal == 0 ? rad : rad * std::cos(azimuthal * theta);
}

std::string GuidedMode::name() const {
  return "LP" + std::to_string(azimuthal) + std::to_string(radial);
}

double normalized_frequency(const FiberSpec& spec) {
  return spec.wavenumber_s() * spec.r_core * spec.numerical_aperture;
}

double characteristic_fn(int i, double u, double v) {
  const double w = std::sqrt(std::max(v * v - u * u, 0.0));
  return u * bessel_j(i - 1, u) * bessel_k(i, w) +
         w * bessel_j(i, u) * bessel_k(i - 1, w);
}

std::vector<double> characteristic_roots(int i, double v) {
  std::vector<double> roots;
  if (!(v > 0)) return roots;
  // Scan (0, V) on a uniform grid; the product form has no poles, so every
  // sign change brackets exactly one root.
  constexpr int kScan = 2000;
  const double du = v / kScan;
  double ua = du, fa = characteristic_fn(i, ua, v);
  for (int k = 2; k < kScan; ++k) {
    const double ub = k * du;
    const double fb = characteristic_fn(i, ub, v);
    if (fa == 0.0) {
      roots.push_back(ua);
    } else if (fa * fb < 0.0) {
      double lo = ua, hi = ub, flo = fa;
      while (hi - lo > 1e-12 * v) {
        const double mid = 0.5 * (lo + hi);
        const double fm = characteristic_fn(i, mid, v);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if (flo * fm < 0.0) {
          hi = mid;
        } else {
          lo = mid;
          flo = fm;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    ua = ub;
    fa = fb;
  }
  return roots;
}

GuidedMode build_mode(int i, int radial_index, double u,
                      const FiberSpec& spec) {
  const double k_s = spec.wavenumber_s();
  const double v = normalized_frequency(spec);
  const double beta2 =
      spec.n_core * spec.n_core * k_s * k_s - (u / spec.r_core) * (u / spec.r_core);
  if (beta2 <= spec.n_clad * spec.n_clad * k_s * k_s)
    throw std::domain_error("characteristic root is not guided (beta below "
                            "cladding line); root finder produced a bad root");
  GuidedMode m;
  m.azimuthal = i;
  m.radial = radial_index;
  m.u = u;
  m.w = std::sqrt(std::max(v * v - u * u, 0.0));
  m.beta = std::sqrt(beta2);
  m.r_core = spec.r_core;
  // Matching coefficients make the profile continuous at r = r_core.
  m.core_scale = bessel_k(i, m.w);
  m.clad_scale = bessel_j(i, u);
  m.norm = 0;  // raw; set by solve_modes after quadrature normalization
  return m;
}

double beat_length(const std::vector<GuidedMode>& modes) {
  if (modes.size() < 2)
    throw std::invalid_argument(
        "beat length undefined for a single mode; supply an explicit step "
        "count instead");
  double dmax = 0;
  for (std::size_t a = 0; a < modes.size(); ++a)
    for (std::size_t b = a + 1; b < modes.size(); ++b)
      dmax = std::max(dmax, std::abs(modes[a].beta - modes[b].beta));
  return 2.0 * FiberSpec::kPi / dmax;
}

ModeFamily solve_modes(const FiberSpec& spec, const CrossSectionRule& rule) {
  ModeFamily family;
  family.v = normalized_frequency(spec);
  // Root counts are non-increasing in the azimuthal order, so stop at the
  // first order with none.
  for (int i = 0;; ++i) {
    const auto roots = characteristic_roots(i, family.v);
    if (roots.empty()) break;
    for (std::size_t j = 0; j < roots.size(); ++j)
      family.modes.push_back(
          build_mode(i, static_cast<int>(j) + 1, roots[j], spec));
  }
  // Ascending u == descending beta == ascending cutoff; LP01 comes first.
  std::sort(family.modes.begin(), family.modes.end(),
            [](const GuidedMode& a, const GuidedMode& b) { return a.u < b.u; });
  for (GuidedMode& m : family.modes) {
    const double phi = mode_norm(m, rule);
    const double s = 1.0 / std::sqrt(phi);
    m.core_scale *= s;
    m.clad_scale *= s;
    m.norm = mode_norm(m, rule);
  }
  if (family.modes.size() >= 2)
    family.beat_length = beat_length(family.modes);
  return family;
}

}  // namespace fiberamp
