#pragma once

#include <string>

#include "fiberamp/config.hpp"

namespace testsupport {

inline std::string config_path(const char* name) {
  return std::string(FIBERAMP_CONFIG_DIR) + "/" + name;
}

inline fiberamp::Config tm_config() {
  return fiberamp::load_config(config_path("tm_nufern.json"));
}

inline fiberamp::Config yb_config() {
  return fiberamp::load_config(config_path("yb_nufern.json"));
}

// NA lowered until only LP01 is guided (V ~ 1.86).
inline fiberamp::Config single_mode_config() {
  fiberamp::Config cfg = tm_config();
  cfg.fiber.numerical_aperture = 0.05;
  cfg.fiber.launch_fractions = {1.0};
  fiberamp::validate(cfg);
  return cfg;
}

// Light quadrature keeps integrator tests fast; identities hold at any order.
inline fiberamp::Config light(fiberamp::Config cfg) {
  cfg.numerics.radial_quad_order = 12;
  cfg.numerics.angular_quad_points = 32;
  return cfg;
}

}  // namespace testsupport
