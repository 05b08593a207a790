// fiberamp: coupled-mode simulation of rare-earth-doped fiber amplifiers
// with an equivalent-short-fiber acceleration mode.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fiberamp/amplifier.hpp"
#include "fiberamp/csv.hpp"
#include "fiberamp/svg.hpp"
#include "fiberamp/version.hpp"

namespace {

using namespace fiberamp;

constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitRuntime = 4;

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// Grid spec: either "a,b,c" or "start:stop:count".
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double start = 0, stop = 0;
    long count = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%ld", &start, &stop, &count) != 3 ||
        count < 1)
      throw ConfigError("bad grid \"" + text + "\", expected start:stop:count");
    for (long i = 0; i < count; ++i)
      out.push_back(count == 1
                        ? start
                        : start + (stop - start) * i / double(count - 1));
    return out;
  }
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ','))
    if (!cell.empty()) out.push_back(std::stod(cell));
  if (out.empty()) throw ConfigError("empty grid \"" + text + "\"");
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SimulationError("cannot write output file: " + path);
  return out;
}

Manifest make_manifest(const Config& cfg) {
  Manifest m;
  m.version = kVersion;
  m.config_hash = config_hash(cfg);
  return m;
}

void write_trace_csv(std::ostream& os, const Config& cfg,
                     const ModeFamily& family, const PowerTrace& trace) {
  CsvWriter w(os);
  Manifest m = make_manifest(cfg);
  m.extra.emplace_back("solver", to_string(cfg.numerics.solver));
  m.extra.emplace_back("steps", std::to_string(trace.total_steps));
  m.extra.emplace_back("step-size-m", format_double(trace.step_size));
  w.manifest(m);
  std::vector<std::string> cols = {"z_m", "P_pump_W"};
  for (const auto& mode : family.modes) cols.push_back("P_" + mode.name() + "_W");
  cols.push_back("P_signal_W");
  w.header(cols);
  std::vector<double> row(cols.size());
  for (std::size_t k = 0; k < trace.samples(); ++k) {
    row[0] = trace.z[k];
    row[1] = trace.pump[k];
    for (int l = 0; l < trace.mode_count; ++l) row[2 + l] = trace.mode_at(k, l);
    row.back() = trace.signal.empty() ? 0.0 : trace.signal[k];
    w.row(row);
  }
}

void plot_trace(const std::string& path, const ModeFamily& family,
                const PowerTrace& trace, const std::string& title) {
  std::vector<PlotSeries> series;
  PlotSeries pump{"pump", trace.z, trace.pump, "", ""};
  series.push_back(pump);
  if (!trace.signal.empty())
    series.push_back({"signal", trace.z, trace.signal, "", ""});
  for (int l = 0; l < trace.mode_count; ++l) {
    PlotSeries s;
    s.label = family.modes[l].name();
    s.x = trace.z;
    s.y.resize(trace.samples());
    for (std::size_t k = 0; k < trace.samples(); ++k) s.y[k] = trace.mode_at(k, l);
    series.push_back(std::move(s));
  }
  {
    PlotSeries total{"signal+pump", trace.z, {}, "#000000", "6,4"};
    total.y.resize(trace.samples());
    for (std::size_t k = 0; k < trace.samples(); ++k)
      total.y[k] = trace.pump[k] + (trace.signal.empty()
                                        ? 0.0
                                        : trace.signal[k]);
    series.push_back(std::move(total));
  }
  PlotStyle style;
  style.title = title;
  style.x_label = "z (m)";
  style.y_label = "power (W)";
  auto out = open_out(path);
  out << svg_line_plot(series, style);
}

int cmd_modes(const Config& cfg, const std::string& out_path) {
  Amplifier amp(cfg);
  const ModeFamily& fam = amp.modes();
  std::ostringstream os;
  CsvWriter w(os);
  Manifest m = make_manifest(cfg);
  m.extra.emplace_back("normalized-frequency", format_double(fam.v));
  m.extra.emplace_back("beat-length-m", fam.beat_length
                                            ? format_double(*fam.beat_length)
                                            : "n/a");
  w.manifest(m);
  w.header({"order", "i", "j", "u", "w", "beta_rad_per_m"});
  for (int l = 0; l < fam.count(); ++l) {
    const GuidedMode& mode = fam.modes[l];
    w.row({double(l + 1), double(mode.azimuthal), double(mode.radial), mode.u,
           mode.w, mode.beta});
  }
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    open_out(out_path) << os.str();
  }
  return 0;
}

int cmd_simulate(Config cfg, const std::string& out_path,
                 const std::string& plot_path, double length,
                 long steps_per_beat) {
  if (length > 0) cfg.fiber.length = length;
  if (steps_per_beat > 0)
    cfg.numerics.steps_per_beat = static_cast<int>(steps_per_beat);
  Amplifier amp(cfg);
  IntegrateOptions opt;
  opt.compute_signal = true;
  const double t0 = now_s();
  const PowerTrace trace = amp.simulate(opt);
  std::fprintf(stderr, "simulate: %ld steps (h = %.4g m), %.2f s\n",
               trace.total_steps, trace.step_size, now_s() - t0);
  auto os = open_out(out_path);
  write_trace_csv(os, cfg, amp.modes(), trace);
  if (!plot_path.empty())
    plot_trace(plot_path, amp.modes(), trace, "power evolution");
  return 0;
}

int cmd_equivalent(const Config& cfg, double l_tilde, bool compare,
                   const std::string& out_path) {
  Amplifier amp(cfg);
  const EquivalentRun run = amp.equivalent(l_tilde, compare);
  std::fprintf(stderr, "equivalent: short %.2f s", run.seconds_short);
  if (compare)
    std::fprintf(stderr, ", original %.2f s (ratio %.1f)",
                 run.seconds_original,
                 run.seconds_original / std::max(1e-9, run.seconds_short));
  std::fprintf(stderr, "\n");

  auto os = open_out(out_path);
  CsvWriter w(os);
  Manifest m = make_manifest(cfg);
  m.extra.emplace_back("l-tilde-m", format_double(l_tilde));
  m.extra.emplace_back("scale", format_double(run.transform.scale));
  const ModeFamily& fam = amp.modes();
  auto comp_name = [&](int l) {
    return l == 0 ? std::string("pump") : fam.modes[l - 1].name();
  };
  if (run.comparison) {
    const ComparisonReport& r = *run.comparison;
    for (int l = 0; l < r.components; ++l) {
      m.extra.emplace_back("max-abs-diff-W-" + comp_name(l),
                           format_double(r.max_abs_diff[l]));
      m.extra.emplace_back("sign-changes-" + comp_name(l),
                           std::to_string(r.sign_changes[l]));
    }
    m.extra.emplace_back("max-abs-diff-W", format_double(r.max_abs));
    m.extra.emplace_back("relative-error", format_double(r.rel_error));
  }
  w.manifest(m);

  std::vector<std::string> cols = {"z_tilde_m"};
  const int comps = run.short_trace.mode_count + 1;
  if (run.comparison)
    for (int l = 0; l < comps; ++l)
      cols.push_back("P_orig_pullback_" + comp_name(l) + "_W");
  for (int l = 0; l < comps; ++l)
    cols.push_back("P_equiv_" + comp_name(l) + "_W");
  w.header(cols);
  const PowerTrace& st = run.short_trace;
  for (std::size_t k = 0; k < st.samples(); ++k) {
    std::vector<double> row;
    row.push_back(st.z[k]);
    if (run.comparison)
      for (int l = 0; l < comps; ++l)
        row.push_back(run.comparison->pulled_back[k * comps + l]);
    row.push_back(st.pump[k]);
    for (int l = 1; l < comps; ++l) row.push_back(st.mode_at(k, l - 1));
    w.row(row);
  }
  return 0;
}

int cmd_sweep(const Config& cfg, const std::string& pp0_text,
              const std::string& lt_text, const std::string& out_path,
              const std::string& plot_path, int threads, int increment) {
  Amplifier amp(cfg);
  SweepOptions opt;
  opt.pump_powers = parse_grid(pp0_text);
  opt.short_lengths = parse_grid(lt_text);
  opt.threads = threads;
  opt.increment_percent = increment;
  const double t0 = now_s();
  const SweepResult sweep = amp.sweep(opt);
  std::fprintf(stderr, "sweep: %zu x %zu grid, %.1f s\n",
               opt.pump_powers.size(), opt.short_lengths.size(),
               now_s() - t0);

  auto os = open_out(out_path);
  CsvWriter w(os);
  Manifest m = make_manifest(cfg);
  m.extra.emplace_back("launch-increment-percent", std::to_string(increment));
  w.manifest(m);
  w.header({"pp0_W", "ltilde_m", "eps", "valid"});
  for (std::size_t ip = 0; ip < opt.pump_powers.size(); ++ip)
    for (std::size_t il = 0; il < opt.short_lengths.size(); ++il)
      w.row({opt.pump_powers[ip], opt.short_lengths[il], sweep.at(ip, il),
             double(sweep.valid[ip * opt.short_lengths.size() + il])});
  for (std::size_t i = 0; i < sweep.errors.size(); ++i)
    if (!sweep.errors[i].empty())
      std::fprintf(stderr, "sweep: cell %zu failed: %s\n", i,
                   sweep.errors[i].c_str());

  if (!plot_path.empty()) {
    HeatmapStyle style;
    style.title = "worst-case relative power deviation";
    style.x_label = "P_p0 (W)";
    style.y_label = "L_tilde (m)";
    // heatmap rows are the short lengths
    std::vector<double> grid(opt.pump_powers.size() *
                             opt.short_lengths.size());
    for (std::size_t il = 0; il < opt.short_lengths.size(); ++il)
      for (std::size_t ip = 0; ip < opt.pump_powers.size(); ++ip)
        grid[il * opt.pump_powers.size() + ip] = sweep.at(ip, il);
    open_out(plot_path) << svg_grid_heatmap(opt.pump_powers,
                                            opt.short_lengths, grid, style);
  }
  return 0;
}

int cmd_diagnose(const Config& cfg, const std::string& out_path) {
  Amplifier amp(cfg);
  const AutonomyReport rep = amp.diagnose();
  auto os = open_out(out_path);
  CsvWriter w(os);
  Manifest m = make_manifest(cfg);
  m.extra.emplace_back("max-eta-over-autonomous",
                       format_double(rep.max_eta_over_autonomous));
  w.manifest(m);
  const ModeFamily& fam = amp.modes();
  std::vector<std::string> cols = {"z_m", "is_l2_diff", "is_l2_rel"};
  for (int l = 0; l < rep.mode_count; ++l)
    cols.push_back("rho_" + fam.modes[l].name() + "_W_per_m");
  for (int l = 0; l < rep.mode_count; ++l)
    cols.push_back("eta_" + fam.modes[l].name() + "_W_per_m");
  for (int l = 0; l < rep.mode_count; ++l)
    cols.push_back("autonomous_" + fam.modes[l].name() + "_W_per_m");
  cols.push_back("eta_pump_W_per_m");
  cols.push_back("autonomous_pump_W_per_m");
  w.header(cols);
  const int mm = rep.mode_count;
  for (std::size_t k = 0; k < rep.z.size(); ++k) {
    std::vector<double> row = {rep.z[k], rep.irradiance_l2_diff[k],
                               rep.irradiance_l2_rel[k]};
    for (int l = 0; l < mm; ++l) row.push_back(rep.rho[k * mm + l]);
    for (int l = 0; l < mm; ++l) row.push_back(rep.eta_mode[k * mm + l]);
    for (int l = 0; l < mm; ++l) row.push_back(rep.autonomous_mode[k * mm + l]);
    row.push_back(rep.eta_pump[k]);
    row.push_back(rep.autonomous_pump[k]);
    w.row(row);
  }
  return 0;
}

int cmd_gain_check(const Config& cfg, int samples,
                   const std::string& out_path) {
  Amplifier amp(cfg);
  const GainCheckReport rep = amp.gain_check(samples);
  std::ostringstream os;
  CsvWriter w(os);
  Manifest m = make_manifest(cfg);
  m.extra.emplace_back("max-rel-residual", format_double(rep.max_rel));
  w.manifest(m);
  std::vector<std::string> cols = {"idx", "I_s_W_m2", "I_p_W_m2"};
  for (const auto& name : rep.level_names) cols.push_back("rel_" + name);
  w.header(cols);
  for (std::size_t k = 0; k < rep.i_s.size(); ++k) {
    std::vector<double> row = {double(k), rep.i_s[k], rep.i_p[k]};
    row.insert(row.end(), rep.rel[k].begin(), rep.rel[k].end());
    w.row(row);
  }
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    open_out(out_path) << os.str();
  }
  std::fprintf(stderr, "gain-check: max relative residual %.3e over %zu rows\n",
               rep.max_rel, rep.i_s.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coupled-mode simulator for rare-earth-doped fiber amplifiers"};
  app.set_version_flag("--version", std::string("fiberamp ") + kVersion);
  app.require_subcommand(1);

  std::string config_path, out_path, plot_path, pp0_text, lt_text;
  double length = 0, l_tilde = 0;
  long steps_per_beat = 0;
  int threads = 0, increment = 10, samples = 200;
  bool compare = false;
  std::string solver;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config JSON file")->required();
  };

  CLI::App* modes = app.add_subcommand("modes", "list guided LP modes");
  add_config(modes);
  modes->add_option("--out", out_path, "output CSV (default stdout)");

  CLI::App* simulate =
      app.add_subcommand("simulate", "integrate the full fiber");
  add_config(simulate);
  simulate->add_option("--out", out_path, "trace CSV")->required();
  simulate->add_option("--solver", solver, "rk4|dopri");
  simulate->add_option("--length", length, "override fiber length (m)");
  simulate->add_option("--steps-per-beat", steps_per_beat,
                       "override ODE steps per beat length");
  simulate->add_option("--plot", plot_path, "also emit an SVG line plot");

  CLI::App* equivalent = app.add_subcommand(
      "equivalent", "run the rescaled short fiber (optionally compare)");
  add_config(equivalent);
  equivalent->add_option("--ltilde", l_tilde, "short fiber length (m)")
      ->required();
  equivalent->add_flag("--compare", compare,
                       "also run the original fiber and report differences");
  equivalent->add_option("--out", out_path, "report CSV")->required();

  CLI::App* sweep = app.add_subcommand(
      "sweep", "worst-case deviation grid over pump power and L_tilde");
  add_config(sweep);
  sweep->add_option("--pp0", pp0_text, "pump grid: a,b,c or start:stop:count")
      ->required();
  sweep->add_option("--ltilde", lt_text, "short-length grid")->required();
  sweep->add_option("--out", out_path, "grid CSV")->required();
  sweep->add_option("--plot", plot_path, "also emit an SVG heatmap");
  sweep->add_option("--threads", threads, "worker threads (default: all)");
  sweep->add_option("--increment", increment,
                    "launch enumeration increment, percent (default 10)");

  CLI::App* diagnose =
      app.add_subcommand("diagnose", "autonomy diagnostics along a run");
  add_config(diagnose);
  diagnose->add_option("--out", out_path, "diagnostics CSV")->required();

  CLI::App* gain_check = app.add_subcommand(
      "gain-check", "closed-form vs rate-equation-oracle residuals");
  add_config(gain_check);
  gain_check->add_option("--samples", samples, "number of random inputs");
  gain_check->add_option("--out", out_path, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return kExitUsage;
  }

  try {
    Config cfg = fiberamp::load_config(config_path);
    if (!solver.empty()) {
      if (solver == "rk4")
        cfg.numerics.solver = SolverKind::RK4;
      else if (solver == "dopri")
        cfg.numerics.solver = SolverKind::DormandPrince;
      else
        throw ConfigError("--solver must be rk4 or dopri");
    }
    if (modes->parsed()) return cmd_modes(cfg, out_path);
    if (simulate->parsed())
      return cmd_simulate(cfg, out_path, plot_path, length, steps_per_beat);
    if (equivalent->parsed())
      return cmd_equivalent(cfg, l_tilde, compare, out_path);
    if (sweep->parsed())
      return cmd_sweep(cfg, pp0_text, lt_text, out_path, plot_path, threads,
                       increment);
    if (diagnose->parsed()) return cmd_diagnose(cfg, out_path);
    if (gain_check->parsed()) return cmd_gain_check(cfg, samples, out_path);
  } catch (const fiberamp::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
