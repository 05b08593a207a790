#include "fiberamp/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fiberamp {

using nlohmann::json;

namespace {

double require_number(const json& obj, const char* section, const char* key) {
  if (!obj.contains(key))
    throw ConfigError(std::string(section) + "." + key + " is missing");
  const auto& v = obj.at(key);
  if (!v.is_number())
    throw ConfigError(std::string(section) + "." + key + " must be a number");
  return v.get<double>();
}

void check(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invariant violated: " + what);
}

}  // namespace

const char* to_string(Dopant d) { return d == Dopant::Tm ? "Tm" : "Yb"; }

const char* to_string(SolverKind s) {
  return s == SolverKind::RK4 ? "rk4" : "dopri";
}

WaveNumbers derive_wave_numbers(const FiberSpec& spec) {
  WaveNumbers wn;
  wn.k_s = spec.wavenumber_s();
  wn.k_p = spec.wavenumber_p();
  wn.omega_s = PhysicalConstants::c * wn.k_s;
  wn.omega_p = PhysicalConstants::c * wn.k_p;
  return wn;
}

void validate(Config& config) {
  FiberSpec& f = config.fiber;
  check(f.r_core > 0, "r_core > 0");
  check(f.r_clad > f.r_core, "r_core < r_clad");
  check(f.numerical_aperture > 0, "NA > 0");
  check(f.numerical_aperture < f.n_core, "NA < n_core");
  f.n_clad = std::sqrt(f.n_core * f.n_core -
                       f.numerical_aperture * f.numerical_aperture);
  check(f.lambda_s > 0 && f.lambda_p > 0, "wavelengths > 0");
  check(f.lambda_p < f.lambda_s, "lambda_p < lambda_s");
  check(f.length > 0, "L > 0");
  check(f.signal_power >= 0 && f.pump_power >= 0, "launch powers >= 0");
  check(!f.launch_fractions.empty(), "launch.fractions nonempty");
  double sum = 0;
  for (double x : f.launch_fractions) {
    check(x >= 0, "launch.fractions nonnegative");
    sum += x;
  }
  check(std::abs(sum - 1.0) <= 1e-12, "launch.fractions sum to 1");

  if (const auto* tm = std::get_if<TmDopantSpec>(&config.dopant)) {
    check(f.dopant == Dopant::Tm, "dopant parameters match fiber.dopant");
    check(tm->n_total > 0, "N_total > 0");
    for (double x : {tm->sigma_abs_p, tm->sigma_ems_p, tm->sigma_abs_s,
                     tm->sigma_ems_s, tm->tau_10, tm->tau_20, tm->tau_21,
                     tm->tau_30, tm->tau_31, tm->tau_32, tm->Gamma_1,
                     tm->Gamma_2, tm->Gamma_3, tm->kappa_r})
      check(x >= 0, "Tm dopant parameters nonnegative");
    for (double t : {tm->tau_10, tm->tau_20, tm->tau_21, tm->tau_30,
                     tm->tau_31, tm->tau_32})
      check(t > 0, "Tm lifetimes > 0");
  } else {
    const auto& yb = std::get<YbDopantSpec>(config.dopant);
    check(f.dopant == Dopant::Yb, "dopant parameters match fiber.dopant");
    check(yb.n_total > 0, "N_total > 0");
    check(yb.tau > 0, "tau > 0");
    for (double x : {yb.sigma_abs_p, yb.sigma_ems_p, yb.sigma_abs_s,
                     yb.sigma_ems_s})
      check(x >= 0, "Yb cross sections nonnegative");
  }

  NumericsSpec& n = config.numerics;
  check(n.steps_per_beat >= 1, "steps_per_beat >= 1");
  check(n.radial_quad_order >= 4, "radial_quad_order >= 4");
  check(n.angular_quad_points >= 4, "angular_quad_points >= 4");
  check(n.output_stride >= 0, "output_stride >= 0");
  if (n.l_tilde)
    check(*n.l_tilde > 0 && *n.l_tilde <= f.length, "0 < L_tilde <= L");
}

Config parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  for (const char* section : {"fiber", "dopant", "numerics", "launch"})
    if (!j.contains(section))
      throw ConfigError(std::string("missing top-level object \"") + section +
                        "\"");

  Config cfg;
  const json& jf = j["fiber"];
  FiberSpec& f = cfg.fiber;
  f.r_core = require_number(jf, "fiber", "r_core");
  f.r_clad = require_number(jf, "fiber", "r_clad");
  f.n_core = require_number(jf, "fiber", "n_core");
  f.numerical_aperture = require_number(jf, "fiber", "numerical_aperture");
  f.lambda_s = require_number(jf, "fiber", "lambda_s");
  f.lambda_p = require_number(jf, "fiber", "lambda_p");
  f.length = require_number(jf, "fiber", "length");
  const std::string dop = jf.value("dopant", "");
  if (dop == "Tm")
    f.dopant = Dopant::Tm;
  else if (dop == "Yb")
    f.dopant = Dopant::Yb;
  else
    throw ConfigError("fiber.dopant must be \"Tm\" or \"Yb\"");

  const json& jd = j["dopant"];
  if (f.dopant == Dopant::Tm) {
    TmDopantSpec d;
    d.sigma_abs_p = require_number(jd, "dopant", "sigma_abs_p");
    d.sigma_ems_p = require_number(jd, "dopant", "sigma_ems_p");
    d.sigma_abs_s = require_number(jd, "dopant", "sigma_abs_s");
    d.sigma_ems_s = require_number(jd, "dopant", "sigma_ems_s");
    d.tau_10 = require_number(jd, "dopant", "tau_10");
    d.tau_20 = require_number(jd, "dopant", "tau_20");
    d.tau_21 = require_number(jd, "dopant", "tau_21");
    d.tau_30 = require_number(jd, "dopant", "tau_30");
    d.tau_31 = require_number(jd, "dopant", "tau_31");
    d.tau_32 = require_number(jd, "dopant", "tau_32");
    d.Gamma_1 = require_number(jd, "dopant", "Gamma_1");
    d.Gamma_2 = require_number(jd, "dopant", "Gamma_2");
    d.Gamma_3 = require_number(jd, "dopant", "Gamma_3");
    d.n_total = require_number(jd, "dopant", "N_total");
    d.kappa_r = require_number(jd, "dopant", "kappa_R");
    cfg.dopant = d;
  } else {
    YbDopantSpec d;
    d.sigma_abs_p = require_number(jd, "dopant", "sigma_abs_p");
    d.sigma_ems_p = require_number(jd, "dopant", "sigma_ems_p");
    d.sigma_abs_s = require_number(jd, "dopant", "sigma_abs_s");
    d.sigma_ems_s = require_number(jd, "dopant", "sigma_ems_s");
    d.tau = require_number(jd, "dopant", "tau");
    d.n_total = require_number(jd, "dopant", "N_total");
    cfg.dopant = d;
  }

  const json& jn = j["numerics"];
  NumericsSpec& n = cfg.numerics;
  if (jn.contains("steps_per_beat"))
    n.steps_per_beat = jn["steps_per_beat"].get<int>();
  if (jn.contains("radial_quad_order"))
    n.radial_quad_order = jn["radial_quad_order"].get<int>();
  if (jn.contains("angular_quad_points"))
    n.angular_quad_points = jn["angular_quad_points"].get<int>();
  if (jn.contains("output_stride"))
    n.output_stride = jn["output_stride"].get<long>();
  if (jn.contains("L_tilde")) n.l_tilde = jn["L_tilde"].get<double>();
  if (jn.contains("solver")) {
    const std::string s = jn["solver"].get<std::string>();
    if (s == "rk4")
      n.solver = SolverKind::RK4;
    else if (s == "dopri")
      n.solver = SolverKind::DormandPrince;
    else
      throw ConfigError("numerics.solver must be \"rk4\" or \"dopri\"");
  }

  const json& jl = j["launch"];
  f.signal_power = require_number(jl, "launch", "P_s0");
  f.pump_power = require_number(jl, "launch", "P_p0");
  if (!jl.contains("fractions") || !jl["fractions"].is_array())
    throw ConfigError("launch.fractions must be an array");
  f.launch_fractions = jl["fractions"].get<std::vector<double>>();

  validate(cfg);
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const Config& config) {
  const FiberSpec& f = config.fiber;
  json j;
  j["fiber"] = {{"r_core", f.r_core},
                {"r_clad", f.r_clad},
                {"n_core", f.n_core},
                {"numerical_aperture", f.numerical_aperture},
                {"lambda_s", f.lambda_s},
                {"lambda_p", f.lambda_p},
                {"length", f.length},
                {"dopant", to_string(f.dopant)}};
  if (const auto* tm = std::get_if<TmDopantSpec>(&config.dopant)) {
    j["dopant"] = {{"sigma_abs_p", tm->sigma_abs_p},
                   {"sigma_ems_p", tm->sigma_ems_p},
                   {"sigma_abs_s", tm->sigma_abs_s},
                   {"sigma_ems_s", tm->sigma_ems_s},
                   {"tau_10", tm->tau_10},
                   {"tau_20", tm->tau_20},
                   {"tau_21", tm->tau_21},
                   {"tau_30", tm->tau_30},
                   {"tau_31", tm->tau_31},
                   {"tau_32", tm->tau_32},
                   {"Gamma_1", tm->Gamma_1},
                   {"Gamma_2", tm->Gamma_2},
                   {"Gamma_3", tm->Gamma_3},
                   {"N_total", tm->n_total},
                   {"kappa_R", tm->kappa_r}};
  } else {
    const auto& yb = std::get<YbDopantSpec>(config.dopant);
    j["dopant"] = {{"sigma_abs_p", yb.sigma_abs_p},
                   {"sigma_ems_p", yb.sigma_ems_p},
                   {"sigma_abs_s", yb.sigma_abs_s},
                   {"sigma_ems_s", yb.sigma_ems_s},
                   {"tau", yb.tau},
                   {"N_total", yb.n_total}};
  }
  const NumericsSpec& n = config.numerics;
  j["numerics"] = {{"steps_per_beat", n.steps_per_beat},
                   {"radial_quad_order", n.radial_quad_order},
                   {"angular_quad_points", n.angular_quad_points},
                   {"solver", to_string(n.solver)},
                   {"output_stride", n.output_stride}};
  if (n.l_tilde) j["numerics"]["L_tilde"] = *n.l_tilde;
  j["launch"] = {{"P_s0", f.signal_power},
                 {"P_p0", f.pump_power},
                 {"fractions", f.launch_fractions}};
  return j.dump(2) + "\n";
}

void save_config(const Config& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file: " + path);
  out << config_to_json(config);
}

std::uint64_t config_hash(const Config& config) {
  const std::string s = config_to_json(config);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace fiberamp
