#pragma once

namespace fiberamp {

/// Fixed CODATA values; not configurable.
struct PhysicalConstants {
  static constexpr double c = 299792458.0;               // speed of light, m/s
  static constexpr double mu0 = 1.25663706212e-6;        // vacuum permeability, H/m
  static constexpr double hbar = 1.054571817e-34;        // reduced Planck constant, J s
};

}  // namespace fiberamp
