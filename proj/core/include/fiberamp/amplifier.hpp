#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fiberamp/equivalent.hpp"

namespace fiberamp {

/// Closed-form vs rate-equation-oracle residuals over sampled irradiances.
struct GainCheckReport {
  std::vector<double> i_s, i_p;
  std::vector<std::vector<double>> rel;  // per row, per level, / N_total
  std::vector<std::string> level_names;
  double max_rel = 0;
};

/// One fiber bound to its discretization; the entry point the CLI uses.
class Amplifier {
 public:
  explicit Amplifier(Config config);

  const Config& config() const { return cfg_; }
  const ModeFamily& modes() const { return disc_->family; }
  std::shared_ptr<const Discretization> discretization() const {
    return disc_;
  }

  /// Integrate the full fiber from the configured launch state.
  PowerTrace simulate(IntegrateOptions options = {}) const;

  EquivalentRun equivalent(double short_length, bool compare) const;

  SweepResult sweep(SweepOptions options) const;

  AutonomyReport diagnose() const;

  GainCheckReport gain_check(int samples, std::uint64_t seed = 20250811) const;

 private:
  Config cfg_;
  std::shared_ptr<const Discretization> disc_;
};

}  // namespace fiberamp
