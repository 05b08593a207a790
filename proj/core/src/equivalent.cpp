#include "fiberamp/equivalent.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace fiberamp {

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// Component l of a trace: 0 = pump, then modes.
double component(const PowerTrace& t, std::size_t sample, int l) {
  return l == 0 ? t.pump[sample] : t.mode_at(sample, l - 1);
}

// Linear interpolation of component l at position z (clamped to the grid).
double interp_component(const PowerTrace& t, int l, double z) {
  const auto& zs = t.z;
  if (z <= zs.front()) return component(t, 0, l);
  if (z >= zs.back()) return component(t, zs.size() - 1, l);
  const auto it = std::upper_bound(zs.begin(), zs.end(), z);
  const std::size_t hi = static_cast<std::size_t>(it - zs.begin());
  const std::size_t lo = hi - 1;
  const double f = (z - zs[lo]) / (zs[hi] - zs[lo]);
  return (1.0 - f) * component(t, lo, l) + f * component(t, hi, l);
}

}  // namespace

EquivalentTransform transform_dopant(const DopantSpec& dopant, double length,
                                     double short_length) {
  if (!(short_length > 0) || short_length > length)
    throw SimulationError("equivalent fiber requires 0 < L_tilde <= L");
  EquivalentTransform t;
  t.length = length;
  t.short_length = short_length;
  t.scale = length / short_length;
  t.dopant = dopant;
  if (auto* tm = std::get_if<TmDopantSpec>(&t.dopant)) {
    tm->n_total *= t.scale;
    tm->kappa_r /= t.scale;
  } else {
    std::get<YbDopantSpec>(t.dopant).n_total *= t.scale;
  }
  return t;
}

GainScalingReport gain_scaling_check(const DopantSpec& dopant,
                                     const FiberSpec& spec, double scale,
                                     int samples, std::uint64_t seed) {
  EquivalentTransform t =
      transform_dopant(dopant, scale * spec.length, spec.length);
  const GainModel base = make_gain_model(dopant, spec);
  const GainModel scaled = make_gain_model(t.dopant, spec);
  auto eval = [](const GainModel& g, double i_s, double i_p) {
    return std::visit([&](const auto& m) { return m.gains(i_s, i_p); }, g);
  };
  // Floor keeps the relative measure meaningful near transparency, where the
  // gain itself crosses zero.
  double sigma_ref = 0, n_ref = 0;
  if (const auto* tm = std::get_if<TmDopantSpec>(&dopant)) {
    sigma_ref = tm->sigma_abs_s;
    n_ref = tm->n_total;
  } else {
    const auto& yb = std::get<YbDopantSpec>(dopant);
    sigma_ref = yb.sigma_abs_s;
    n_ref = yb.n_total;
  }
  const double floor = 1e-3 * sigma_ref * n_ref;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_i(0.0, 14.0);
  GainScalingReport report;
  report.samples = samples;
  for (int k = 0; k < samples; ++k) {
    const double i_s = std::pow(10.0, log_i(rng));
    const double i_p = std::pow(10.0, log_i(rng));
    const GainSample a = eval(base, i_s, i_p);
    const GainSample b = eval(scaled, i_s, i_p);
    const double es = std::abs(b.signal - scale * a.signal) /
                      (scale * std::max(std::abs(a.signal), floor));
    const double ep = std::abs(b.pump - scale * a.pump) /
                      (scale * std::max(std::abs(a.pump), floor));
    report.max_rel_error = std::max({report.max_rel_error, es, ep});
  }
  return report;
}

ComparisonReport compare_on_short_grid(const PowerTrace& original,
                                       const PowerTrace& short_trace,
                                       double scale) {
  const int comps = short_trace.mode_count + 1;
  ComparisonReport r;
  r.components = comps;
  r.z_short = short_trace.z;
  const std::size_t n = short_trace.samples();
  r.pulled_back.resize(n * comps);
  r.short_power.resize(n * comps);
  r.max_abs_diff.assign(comps, 0.0);
  r.sign_changes.assign(comps, 0);

  double denom = 0;
  for (std::size_t k = 0; k < original.samples(); ++k)
    for (int l = 0; l < comps; ++l)
      denom = std::max(denom, std::abs(component(original, k, l)));

  for (int l = 0; l < comps; ++l) {
    double prev_sign = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double pb =
          interp_component(original, l, short_trace.z[k] * scale);
      const double sp = component(short_trace, k, l);
      r.pulled_back[k * comps + l] = pb;
      r.short_power[k * comps + l] = sp;
      const double diff = pb - sp;
      r.max_abs_diff[l] = std::max(r.max_abs_diff[l], std::abs(diff));
      const double s = diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0);
      if (s != 0.0) {
        if (prev_sign != 0.0 && s != prev_sign) ++r.sign_changes[l];
        prev_sign = s;
      }
    }
    r.max_abs = std::max(r.max_abs, r.max_abs_diff[l]);
  }
  r.rel_error = denom > 0 ? r.max_abs / denom : 0.0;
  return r;
}

double epsilon_ratio(const PowerTrace& original,
                     const PowerTrace& short_trace, double scale) {
  const int comps = original.mode_count + 1;
  double num = 0, denom = 0;
  for (std::size_t k = 0; k < original.samples(); ++k) {
    const double z = original.z[k];
    for (int l = 0; l < comps; ++l) {
      const double p = component(original, k, l);
      const double pt = interp_component(short_trace, l, z / scale);
      num = std::max(num, std::abs(p - pt));
      denom = std::max(denom, std::abs(p));
    }
  }
  return denom > 0 ? num / denom : 0.0;
}

EquivalentRun run_equivalent(const Config& config,
                             std::shared_ptr<const Discretization> disc,
                             const EquivalentRunOptions& options) {
  EquivalentRun out;
  out.transform = transform_dopant(config.dopant, config.fiber.length,
                                   options.short_length);
  const StateVector y0 = launch_state(config.fiber, disc->mode_count());

  IntegrateOptions iopt;
  iopt.solver = options.solver;
  iopt.steps_per_beat = options.steps_per_beat;
  iopt.output_stride = options.output_stride;

  {
    CmtSystem short_system(disc,
                           make_gain_model(out.transform.dopant, config.fiber));
    IntegrateOptions sopt = iopt;
    sopt.length = options.short_length;
    const double t0 = now_seconds();
    out.short_trace = short_system.integrate(y0, sopt);
    out.seconds_short = now_seconds() - t0;
  }
  if (options.compare) {
    CmtSystem system(disc, make_gain_model(config.dopant, config.fiber));
    IntegrateOptions lopt = iopt;
    lopt.length = config.fiber.length;
    const double t0 = now_seconds();
    out.original = system.integrate(y0, lopt);
    out.seconds_original = now_seconds() - t0;
    out.comparison = compare_on_short_grid(*out.original, out.short_trace,
                                           out.transform.scale);
  }
  return out;
}

std::vector<std::vector<double>> enumerate_launches(int mode_count,
                                                    int increment_percent) {
  if (mode_count < 1 || increment_percent < 1 ||
      100 % increment_percent != 0)
    throw SimulationError("launch enumeration needs an increment dividing 100");
  const int units = 100 / increment_percent;
  std::vector<std::vector<double>> out;
  std::vector<int> parts(mode_count, 0);
  // Lexicographic enumeration of compositions of `units`.
  auto recurse = [&](auto&& self, int index, int remaining) -> void {
    if (index == mode_count - 1) {
      parts[index] = remaining;
      std::vector<double> fractions(mode_count);
      for (int i = 0; i < mode_count; ++i)
        fractions[i] = static_cast<double>(parts[i]) / units;
      out.push_back(std::move(fractions));
      return;
    }
    for (int take = 0; take <= remaining; ++take) {
      parts[index] = take;
      self(self, index + 1, remaining - take);
    }
  };
  recurse(recurse, 0, units);
  return out;
}

SweepResult epsilon_sweep(const Config& config,
                          std::shared_ptr<const Discretization> disc,
                          const SweepOptions& options) {
  const std::size_t np = options.pump_powers.size();
  const std::size_t nl = options.short_lengths.size();
  if (np == 0 || nl == 0)
    throw SimulationError("sweep grids must be nonempty");
  for (double p : options.pump_powers)
    if (!(p > 0) || p > 1e7)
      throw SimulationError("pump power grid outside the physical range");

  const auto launches =
      enumerate_launches(disc->mode_count(), options.increment_percent);
  const std::size_t jobs = np * launches.size();

  // Per-(pump, launch) job: one original run reused across every short
  // length. Results land in preowned slots, so scheduling order cannot
  // change the outcome.
  struct JobResult {
    std::vector<double> ratio;       // per short length; NaN on failure
    std::vector<std::string> error;  // per short length
  };
  std::vector<JobResult> results(jobs);

  // Original trace sampled densely enough to resolve beat-scale power
  // oscillation in the pullback (>= ~8 samples per beat).
  const long orig_stride = std::max(1, options.steps_per_beat / 8);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= jobs) return;
      const std::size_t ip = job / launches.size();
      const std::size_t ilaunch = job % launches.size();
      JobResult& res = results[job];
      res.ratio.assign(nl, std::numeric_limits<double>::quiet_NaN());
      res.error.assign(nl, "");

      FiberSpec fiber = config.fiber;
      fiber.pump_power = options.pump_powers[ip];
      fiber.launch_fractions = launches[ilaunch];

      PowerTrace original;
      try {
        CmtSystem system(disc, make_gain_model(config.dopant, fiber));
        IntegrateOptions iopt;
        iopt.solver = options.solver;
        iopt.steps_per_beat = options.steps_per_beat;
        iopt.length = fiber.length;
        iopt.output_stride = orig_stride;
        original =
            system.integrate(launch_state(fiber, disc->mode_count()), iopt);
      } catch (const std::exception& e) {
        for (std::size_t il = 0; il < nl; ++il) res.error[il] = e.what();
        continue;
      }
      for (std::size_t il = 0; il < nl; ++il) {
        try {
          const EquivalentTransform t = transform_dopant(
              config.dopant, fiber.length, options.short_lengths[il]);
          CmtSystem short_system(disc, make_gain_model(t.dopant, fiber));
          IntegrateOptions sopt;
          sopt.solver = options.solver;
          sopt.steps_per_beat = options.steps_per_beat;
          sopt.length = t.short_length;
          sopt.output_stride = 1;
          const PowerTrace short_trace = short_system.integrate(
              launch_state(fiber, disc->mode_count()), sopt);
          res.ratio[il] = epsilon_ratio(original, short_trace, t.scale);
        } catch (const std::exception& e) {
          res.error[il] = e.what();
        }
      }
    }
  };

  int threads = options.threads > 0
                    ? options.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(jobs)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SweepResult sweep;
  sweep.pump_powers = options.pump_powers;
  sweep.short_lengths = options.short_lengths;
  sweep.eps.assign(np * nl, 0.0);
  sweep.valid.assign(np * nl, 1);
  sweep.errors.assign(np * nl, "");
  for (std::size_t ip = 0; ip < np; ++ip) {
    for (std::size_t il = 0; il < nl; ++il) {
      double cell = 0;
      for (std::size_t j = 0; j < launches.size(); ++j) {
        const JobResult& res = results[ip * launches.size() + j];
        if (!res.error[il].empty()) {
          sweep.valid[ip * nl + il] = 0;
          if (sweep.errors[ip * nl + il].empty())
            sweep.errors[ip * nl + il] = res.error[il];
        } else {
          cell = std::max(cell, res.ratio[il]);
        }
      }
      sweep.eps[ip * nl + il] = cell;
    }
  }
  return sweep;
}

AutonomyReport autonomy_diagnostics(const PowerTrace& trace,
                                    const CmtSystem& system) {
  if (!trace.has_states())
    throw SimulationError("diagnostics require a trace with stored states");
  const Discretization& d = system.disc();
  const int m = trace.mode_count;
  const std::size_t q = d.nodes();
  const std::size_t n = trace.samples();
  const auto& modes = d.family.modes;

  AutonomyReport rep;
  rep.mode_count = m;
  rep.z = trace.z;
  rep.irradiance_l2_diff.resize(n);
  rep.irradiance_l2_rel.resize(n);
  rep.rho.resize(n * m);
  rep.eta_mode.resize(n * m);
  rep.autonomous_mode.resize(n * m);
  rep.eta_pump.resize(n);
  rep.autonomous_pump.resize(n);

  const GainModel& gain = system.gain();
  std::vector<double> surrogate(q), gs(q), gp(q), gs_true(q), gp_true(q),
      is_true(q);
  std::vector<std::complex<double>> a(m);

  for (std::size_t k = 0; k < n; ++k) {
    const StateVector state = trace.state_at(k);
    const double z = trace.z[k];
    const double i_p = state.pump_irradiance;
    for (int l = 0; l < m; ++l) {
      const double arg = (modes[l].beta - modes[0].beta) * z;
      a[l] = state.amplitudes[l] *
             std::complex<double>{std::cos(arg), std::sin(arg)};
    }
    // True irradiance with cross terms and the power-only surrogate.
    for (std::size_t i = 0; i < q; ++i) {
      std::complex<double> f{0, 0};
      double s = 0;
      for (int l = 0; l < m; ++l) {
        const double mv = d.mode_values[l * q + i];
        f += a[l] * mv;
        s += std::norm(a[l]) * mv * mv;
      }
      is_true[i] = d.irradiance_factor[i] * std::norm(f);
      surrogate[i] = d.irradiance_factor[i] * s;
    }
    double l2 = 0, l2ref = 0;
    for (std::size_t i = 0; i < q; ++i) {
      const double diff = is_true[i] - surrogate[i];
      l2 += d.rule.weight[i] * diff * diff;
      l2ref += d.rule.weight[i] * is_true[i] * is_true[i];
    }
    rep.irradiance_l2_diff[k] = std::sqrt(l2);
    rep.irradiance_l2_rel[k] =
        l2ref > 0 ? std::sqrt(l2 / l2ref) : 0.0;

    const std::size_t qc = d.rule.core_count;
    std::visit(
        [&](const auto& g) {
          g.gains_batch(std::span(is_true).first(qc), i_p,
                        std::span(gs_true).first(qc),
                        std::span(gp_true).first(qc));
          g.gains_batch(std::span(surrogate).first(qc), i_p,
                        std::span(gs).first(qc), std::span(gp).first(qc));
        },
        gain);

    double mean_gp_true = 0, mean_gp_surr = 0;
    for (std::size_t i = 0; i < qc; ++i) {
      mean_gp_true += d.rule.weight[i] * gp_true[i];
      mean_gp_surr += d.rule.weight[i] * gp[i];
    }
    mean_gp_true /= d.rule.area();
    mean_gp_surr /= d.rule.area();
    const double p0 = trace.pump[k];
    rep.eta_pump[k] = (mean_gp_true - mean_gp_surr) * p0;
    rep.autonomous_pump[k] = mean_gp_surr * p0;

    const double k_s = d.fiber.wavenumber_s();
    for (int l = 0; l < m; ++l) {
      const double pref =
          k_s / (2.0 * modes[l].beta) * d.inv_l2_norm[l];
      double k_true_ll = 0, kappa_ll = 0;
      const double* pp = d.pair_products.data() + d.pair_index(l, l) * qc;
      for (std::size_t i = 0; i < qc; ++i) {
        k_true_ll += pp[i] * gs_true[i];
        kappa_ll += pp[i] * gs[i];
      }
      k_true_ll *= pref;
      kappa_ll *= pref;
      const double pl = trace.mode_at(k, l);
      rep.eta_mode[k * m + l] = 2.0 * (k_true_ll - kappa_ll) * pl;
      rep.autonomous_mode[k * m + l] = 2.0 * kappa_ll * pl;

      double rho = 0;
      for (int j = 0; j < m; ++j) {
        if (j == l) continue;
        const std::size_t pi = d.pair_index(std::min(l, j), std::max(l, j));
        double s = 0;
        const double* ppj = d.pair_products.data() + pi * qc;
        for (std::size_t i = 0; i < qc; ++i) s += ppj[i] * gs_true[i];
        const double klj = pref * s;
        rho += 2.0 * (klj * std::conj(a[l]) * a[j]).real();
      }
      rep.rho[k * m + l] = rho;
    }
  }

  double worst = 0;
  for (std::size_t k = 0; k < n; ++k) {
    for (int l = 0; l < m; ++l) {
      const double auto_term = std::abs(rep.autonomous_mode[k * m + l]);
      const double eta = std::abs(rep.eta_mode[k * m + l]) +
                         std::abs(rep.rho[k * m + l]);
      if (auto_term > 1e-30) worst = std::max(worst, eta / auto_term);
    }
    const double auto_p = std::abs(rep.autonomous_pump[k]);
    if (auto_p > 1e-30)
      worst = std::max(worst, std::abs(rep.eta_pump[k]) / auto_p);
  }
  rep.max_eta_over_autonomous = worst;
  return rep;
}

}  // namespace fiberamp
