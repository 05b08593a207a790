#include "fiberamp/amplifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace fiberamp {

Amplifier::Amplifier(Config config) : cfg_(std::move(config)) {
  disc_ = Discretization::build(cfg_.fiber, cfg_.numerics);
}

PowerTrace Amplifier::simulate(IntegrateOptions options) const {
  if (options.length <= 0) options.length = cfg_.fiber.length;
  options.solver = cfg_.numerics.solver;
  if (options.steps_per_beat <= 0)
    options.steps_per_beat = cfg_.numerics.steps_per_beat;
  if (options.output_stride <= 0 && cfg_.numerics.output_stride > 0)
    options.output_stride = cfg_.numerics.output_stride;
  CmtSystem system(disc_, make_gain_model(cfg_.dopant, cfg_.fiber));
  return system.integrate(launch_state(cfg_.fiber, disc_->mode_count()),
                          options);
}

EquivalentRun Amplifier::equivalent(double short_length, bool compare) const {
  EquivalentRunOptions opt;
  opt.short_length = short_length;
  opt.compare = compare;
  opt.solver = cfg_.numerics.solver;
  opt.steps_per_beat = cfg_.numerics.steps_per_beat;
  return run_equivalent(cfg_, disc_, opt);
}

SweepResult Amplifier::sweep(SweepOptions options) const {
  options.solver = cfg_.numerics.solver;
  options.steps_per_beat = cfg_.numerics.steps_per_beat;
  return epsilon_sweep(cfg_, disc_, options);
}

AutonomyReport Amplifier::diagnose() const {
  IntegrateOptions opt;
  opt.length = cfg_.fiber.length;
  opt.solver = cfg_.numerics.solver;
  opt.steps_per_beat = cfg_.numerics.steps_per_beat;
  opt.store_states = true;
  CmtSystem system(disc_, make_gain_model(cfg_.dopant, cfg_.fiber));
  const PowerTrace trace =
      system.integrate(launch_state(cfg_.fiber, disc_->mode_count()), opt);
  return autonomy_diagnostics(trace, system);
}

GainCheckReport Amplifier::gain_check(int samples, std::uint64_t seed) const {
  GainCheckReport report;
  const double omega_s = cfg_.fiber.omega_s();
  const double omega_p = cfg_.fiber.omega_p();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_i(0.0, 14.0);

  // Edge pairs first, then random log-uniform irradiances.
  std::vector<std::pair<double, double>> inputs = {
      {0.0, 0.0},
      {0.0, cfg_.fiber.pump_power / cfg_.fiber.cladding_area()},
      {cfg_.fiber.signal_power / cfg_.fiber.cladding_area(), 0.0}};
  for (int k = static_cast<int>(inputs.size()); k < samples; ++k)
    inputs.emplace_back(std::pow(10.0, log_i(rng)),
                        std::pow(10.0, log_i(rng)));

  if (const auto* tm = std::get_if<TmDopantSpec>(&cfg_.dopant)) {
    report.level_names = {"N0", "N1", "N2", "N3"};
    for (const auto& [i_s, i_p] : inputs) {
      const TmPopulations c = tm_steady_state(i_s, i_p, *tm, omega_s, omega_p);
      const TmPopulations o = tm_rate_oracle(i_s, i_p, *tm, omega_s, omega_p);
      const std::array<double, 4> diff = {c.n0 - o.n0, c.n1 - o.n1,
                                          c.n2 - o.n2, c.n3 - o.n3};
      std::vector<double> rel(4);
      for (int i = 0; i < 4; ++i) rel[i] = std::abs(diff[i]) / tm->n_total;
      report.max_rel =
          std::max(report.max_rel, *std::max_element(rel.begin(), rel.end()));
      report.i_s.push_back(i_s);
      report.i_p.push_back(i_p);
      report.rel.push_back(std::move(rel));
    }
  } else {
    const auto& yb = std::get<YbDopantSpec>(cfg_.dopant);
    report.level_names = {"N_ground", "N_excited"};
    for (const auto& [i_s, i_p] : inputs) {
      const YbPopulations c = yb_steady_state(i_s, i_p, yb, omega_s, omega_p);
      const YbPopulations o = yb_rate_oracle(i_s, i_p, yb, omega_s, omega_p);
      std::vector<double> rel = {std::abs(c.ground - o.ground) / yb.n_total,
                                 std::abs(c.excited - o.excited) / yb.n_total};
      report.max_rel =
          std::max(report.max_rel, *std::max_element(rel.begin(), rel.end()));
      report.i_s.push_back(i_s);
      report.i_p.push_back(i_p);
      report.rel.push_back(std::move(rel));
    }
  }
  return report;
}

}  // namespace fiberamp
