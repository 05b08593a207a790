#include "fiberamp/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace fiberamp {

std::shared_ptr<const Discretization> Discretization::build(
    const FiberSpec& spec, const NumericsSpec& numerics) {
  auto disc = std::make_shared<Discretization>();
  disc->fiber = spec;
  disc->rule = build_rule(spec, numerics.radial_quad_order,
                          numerics.angular_quad_points);
  disc->family = solve_modes(spec, disc->rule);
  if (disc->family.modes.empty())
    throw SimulationError("fiber guides no modes at the signal wavelength");
  if (!spec.launch_fractions.empty() &&
      static_cast<int>(spec.launch_fractions.size()) != disc->family.count())
    throw ConfigError(
        "launch.fractions must have one entry per guided mode (" +
        std::to_string(disc->family.count()) + " modes found, " +
        std::to_string(spec.launch_fractions.size()) + " fractions given)");

  const std::size_t q = disc->rule.size();
  const int m = disc->family.count();
  const double inv_mu0c =
      1.0 / (PhysicalConstants::mu0 * PhysicalConstants::c);

  disc->mode_values.resize(static_cast<std::size_t>(m) * q);
  for (int l = 0; l < m; ++l)
    for (std::size_t k = 0; k < q; ++k)
      disc->mode_values[l * q + k] =
          disc->family.modes[l].value(disc->rule.r[k], disc->rule.theta[k]);

  disc->irradiance_factor.resize(q);
  for (std::size_t k = 0; k < q; ++k)
    disc->irradiance_factor[k] = disc->rule.index_at(k) * inv_mu0c;

  const std::size_t qc = disc->rule.core_count;
  disc->pair_products.resize(static_cast<std::size_t>(m) * (m + 1) / 2 * qc);
  std::size_t p = 0;
  for (int l = 0; l < m; ++l) {
    for (int j = l; j < m; ++j, ++p) {
      double* out = disc->pair_products.data() + p * qc;
      const double* a = disc->mode_values.data() + l * q;
      const double* b = disc->mode_values.data() + j * q;
      for (std::size_t k = 0; k < qc; ++k)
        out[k] = disc->rule.index_at(k) * disc->rule.weight[k] * a[k] * b[k];
    }
  }

  disc->inv_l2_norm.resize(m);
  for (int l = 0; l < m; ++l) {
    const double* a = disc->mode_values.data() + l * q;
    double s = 0;
    for (std::size_t k = 0; k < q; ++k) s += disc->rule.weight[k] * a[k] * a[k];
    disc->inv_l2_norm[l] = 1.0 / s;
  }
  return disc;
}

std::size_t Discretization::pair_index(int l, int m) const {
  const int n = family.count();
  // row-major upper triangle, l <= m
  return static_cast<std::size_t>(l) * (2 * n - l - 1) / 2 + m;
}

StateVector PowerTrace::state_at(std::size_t sample) const {
  StateVector s;
  const std::size_t w = 1 + 2 * static_cast<std::size_t>(mode_count);
  const double* y = states.data() + sample * w;
  s.pump_irradiance = y[0];
  s.amplitudes.resize(mode_count);
  for (int l = 0; l < mode_count; ++l)
    s.amplitudes[l] = {y[1 + 2 * l], y[2 + 2 * l]};
  s.z = z[sample];
  return s;
}

long prescribed_steps(const ModeFamily& family, double length,
                      int steps_per_beat, std::optional<long> explicit_steps) {
  if (explicit_steps) {
    if (*explicit_steps < 1)
      throw SimulationError("explicit step count must be positive");
    return *explicit_steps;
  }
  if (!family.beat_length)
    return static_cast<long>(std::ceil(1e4 * length));
  return static_cast<long>(
      std::ceil(length / (*family.beat_length / steps_per_beat)));
}

StateVector launch_state(const FiberSpec& spec, int mode_count) {
  if (static_cast<int>(spec.launch_fractions.size()) != mode_count)
    throw ConfigError("launch.fractions size does not match the mode count");
  StateVector y0;
  y0.pump_irradiance = spec.pump_power / spec.cladding_area();
  y0.amplitudes.resize(mode_count);
  for (int l = 0; l < mode_count; ++l)
    y0.amplitudes[l] = std::sqrt(spec.launch_fractions[l] * spec.signal_power);
  y0.z = 0;
  return y0;
}

struct CmtSystem::Workspace {
  std::vector<double> field_re, field_im, irradiance, g_s, g_p;
  std::vector<double> pair_sums;               // npairs
  std::vector<double> kmat;                    // M x M, real
  std::vector<std::complex<double>> phase, c;  // M
  // solver buffers
  std::vector<double> stage[7];
  std::vector<double> y_tmp, y_err;

  Workspace(std::size_t q, int m, std::size_t state_len) {
    field_re.resize(q);
    field_im.resize(q);
    irradiance.resize(q);
    g_s.resize(q);
    g_p.resize(q);
    pair_sums.resize(static_cast<std::size_t>(m) * (m + 1) / 2);
    kmat.resize(static_cast<std::size_t>(m) * m);
    phase.resize(m);
    c.resize(m);
    for (auto& s : stage) s.resize(state_len);
    y_tmp.resize(state_len);
    y_err.resize(state_len);
  }
};

CmtSystem::CmtSystem(std::shared_ptr<const Discretization> disc,
                     GainModel gain)
    : disc_(std::move(disc)), gain_(std::move(gain)) {
  const auto& modes = disc_->family.modes;
  const double k_s = disc_->fiber.wavenumber_s();
  beta_rel_.resize(modes.size());
  k_pref_.resize(modes.size());
  for (std::size_t l = 0; l < modes.size(); ++l) {
    beta_rel_[l] = modes[l].beta - modes[0].beta;
    k_pref_[l] = k_s / (2.0 * modes[l].beta) * disc_->inv_l2_norm[l];
  }
}

void CmtSystem::eval_rhs(double z, const double* y, double* dy,
                         Workspace& ws) const {
  const Discretization& d = *disc_;
  const int m = d.mode_count();
  const std::size_t q = d.nodes();
  const std::size_t qc = d.rule.core_count;  // gain is zero outside the core
  const double i_p = y[0];

  for (int l = 0; l < m; ++l) {
    const double arg = beta_rel_[l] * z;
    ws.phase[l] = {std::cos(arg), std::sin(arg)};
    ws.c[l] = std::complex<double>{y[1 + 2 * l], y[2 + 2 * l]} * ws.phase[l];
  }

  // Signal irradiance at the core nodes (common phase drops out of |.|^2).
  double* __restrict re = ws.field_re.data();
  double* __restrict im = ws.field_im.data();
  {
    const double* mv = d.mode_values.data();
    const double cr0 = ws.c[0].real(), ci0 = ws.c[0].imag();
    for (std::size_t k = 0; k < qc; ++k) {
      re[k] = cr0 * mv[k];
      im[k] = ci0 * mv[k];
    }
    for (int l = 1; l < m; ++l) {
      const double* __restrict mvl = mv + static_cast<std::size_t>(l) * q;
      const double cr = ws.c[l].real(), ci = ws.c[l].imag();
      for (std::size_t k = 0; k < qc; ++k) {
        re[k] += cr * mvl[k];
        im[k] += ci * mvl[k];
      }
    }
    const double* __restrict irr = d.irradiance_factor.data();
    double* __restrict is = ws.irradiance.data();
    for (std::size_t k = 0; k < qc; ++k)
      is[k] = irr[k] * (re[k] * re[k] + im[k] * im[k]);
  }

  std::visit(
      [&](const auto& g) {
        g.gains_batch(std::span(ws.irradiance).first(qc), i_p,
                      std::span(ws.g_s).first(qc),
                      std::span(ws.g_p).first(qc));
      },
      gain_);

  const double* wq = d.rule.weight.data();
  {
    const double* gp = ws.g_p.data();
    double acc = 0;
    for (std::size_t k = 0; k < qc; ++k) acc += wq[k] * gp[k];
    dy[0] = acc / d.rule.area() * i_p;
  }

  {
    const double* gs = ws.g_s.data();
    std::size_t p = 0;
    for (int l = 0; l < m; ++l) {
      for (int j = l; j < m; ++j, ++p) {
        const double* pp = d.pair_products.data() + p * qc;
        double s = 0;
        for (std::size_t k = 0; k < qc; ++k) s += pp[k] * gs[k];
        ws.kmat[l * m + j] = k_pref_[l] * s;
        ws.kmat[j * m + l] = k_pref_[j] * s;
      }
    }
  }

  for (int l = 0; l < m; ++l) {
    std::complex<double> t{0.0, 0.0};
    for (int j = 0; j < m; ++j) t += ws.kmat[l * m + j] * ws.c[j];
    t *= std::conj(ws.phase[l]);
    dy[1 + 2 * l] = t.real();
    dy[2 + 2 * l] = t.imag();
  }
}

double CmtSystem::signal_power_flat(double z, const double* y,
                                    Workspace& ws) const {
  const Discretization& d = *disc_;
  const int m = d.mode_count();
  const std::size_t q = d.nodes();
  for (int l = 0; l < m; ++l) {
    const double arg = beta_rel_[l] * z;
    ws.phase[l] = {std::cos(arg), std::sin(arg)};
    ws.c[l] = std::complex<double>{y[1 + 2 * l], y[2 + 2 * l]} * ws.phase[l];
  }
  const double* mv = d.mode_values.data();
  double* re = ws.field_re.data();
  double* im = ws.field_im.data();
  const double cr0 = ws.c[0].real(), ci0 = ws.c[0].imag();
  for (std::size_t k = 0; k < q; ++k) {
    re[k] = cr0 * mv[k];
    im[k] = ci0 * mv[k];
  }
  for (int l = 1; l < m; ++l) {
    const double* mvl = mv + static_cast<std::size_t>(l) * q;
    const double cr = ws.c[l].real(), ci = ws.c[l].imag();
    for (std::size_t k = 0; k < q; ++k) {
      re[k] += cr * mvl[k];
      im[k] += ci * mvl[k];
    }
  }
  const double* irr = d.irradiance_factor.data();
  const double* wq = d.rule.weight.data();
  double acc = 0;
  for (std::size_t k = 0; k < q; ++k)
    acc += wq[k] * irr[k] * (re[k] * re[k] + im[k] * im[k]);
  return acc;
}

CouplingMatrix CmtSystem::coupling_matrix(double z,
                                          const StateVector& state) const {
  const int m = mode_count();
  const std::size_t len = 1 + 2 * static_cast<std::size_t>(m);
  Workspace ws(disc_->nodes(), m, len);
  std::vector<double> y(len), dy(len);
  y[0] = state.pump_irradiance;
  for (int l = 0; l < m; ++l) {
    y[1 + 2 * l] = state.amplitudes[l].real();
    y[2 + 2 * l] = state.amplitudes[l].imag();
  }
  eval_rhs(z, y.data(), dy.data(), ws);
  CouplingMatrix out;
  out.size = m;
  out.k.resize(static_cast<std::size_t>(m) * m);
  for (int l = 0; l < m * m; ++l) out.k[l] = ws.kmat[l];
  const double* wq = disc_->rule.weight.data();
  double acc = 0;
  for (std::size_t k = 0; k < disc_->rule.core_count; ++k)
    acc += wq[k] * ws.g_p[k];
  out.mean_pump_gain = acc / disc_->rule.area();
  return out;
}

StateVector CmtSystem::rhs(double z, const StateVector& state) const {
  const int m = mode_count();
  const std::size_t len = 1 + 2 * static_cast<std::size_t>(m);
  Workspace ws(disc_->nodes(), m, len);
  std::vector<double> y(len), dy(len);
  y[0] = state.pump_irradiance;
  for (int l = 0; l < m; ++l) {
    y[1 + 2 * l] = state.amplitudes[l].real();
    y[2 + 2 * l] = state.amplitudes[l].imag();
  }
  eval_rhs(z, y.data(), dy.data(), ws);
  StateVector out;
  out.pump_irradiance = dy[0];
  out.amplitudes.resize(m);
  for (int l = 0; l < m; ++l) out.amplitudes[l] = {dy[1 + 2 * l], dy[2 + 2 * l]};
  out.z = z;
  return out;
}

double CmtSystem::signal_power(double z, const StateVector& state) const {
  const int m = mode_count();
  const std::size_t len = 1 + 2 * static_cast<std::size_t>(m);
  Workspace ws(disc_->nodes(), m, len);
  std::vector<double> y(len);
  y[0] = state.pump_irradiance;
  for (int l = 0; l < m; ++l) {
    y[1 + 2 * l] = state.amplitudes[l].real();
    y[2 + 2 * l] = state.amplitudes[l].imag();
  }
  return signal_power_flat(z, y.data(), ws);
}

namespace {

// Dormand-Prince 5(4) tableau; stage 7 is first-same-as-last.
constexpr double kDpC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kDpA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double kDpB4[7] = {5179.0 / 57600,    0.0,         7571.0 / 16695,
                             393.0 / 640,       -92097.0 / 339200,
                             187.0 / 2100,      1.0 / 40};

}  // namespace

PowerTrace CmtSystem::integrate(const StateVector& initial,
                                const IntegrateOptions& options) const {
  const Discretization& d = *disc_;
  const int m = d.mode_count();
  if (static_cast<int>(initial.amplitudes.size()) != m)
    throw SimulationError("initial state has wrong number of amplitudes");
  const double length =
      options.length > 0 ? options.length : d.fiber.length;
  const long nsteps = prescribed_steps(d.family, length,
                                       options.steps_per_beat,
                                       options.explicit_steps);
  const double h = length / static_cast<double>(nsteps);
  const long stride = options.output_stride > 0
                          ? options.output_stride
                          : std::max<long>(1, nsteps / 2000);

  const std::size_t len = 1 + 2 * static_cast<std::size_t>(m);
  Workspace ws(d.nodes(), m, len);
  std::vector<double> y(len);
  y[0] = initial.pump_irradiance;
  for (int l = 0; l < m; ++l) {
    y[1 + 2 * l] = initial.amplitudes[l].real();
    y[2 + 2 * l] = initial.amplitudes[l].imag();
  }

  PowerTrace trace;
  trace.mode_count = m;
  trace.total_steps = nsteps;
  trace.step_size = h;
  const std::size_t est = static_cast<std::size_t>(nsteps / stride) + 2;
  trace.z.reserve(est);
  trace.pump.reserve(est);
  trace.mode_power.reserve(est * m);
  if (options.compute_signal) trace.signal.reserve(est);
  if (options.store_states) trace.states.reserve(est * len);

  const double area = d.rule.area();
  auto record = [&](long step, double z) {
    trace.z.push_back(z);
    trace.pump.push_back(area * y[0]);
    for (int l = 0; l < m; ++l)
      trace.mode_power.push_back(y[1 + 2 * l] * y[1 + 2 * l] +
                                 y[2 + 2 * l] * y[2 + 2 * l]);
    if (options.compute_signal)
      trace.signal.push_back(signal_power_flat(z, y.data(), ws));
    if (options.store_states)
      trace.states.insert(trace.states.end(), y.begin(), y.end());
    (void)step;
  };
  auto check_finite = [&](long step, double z) {
    for (double v : y)
      if (!std::isfinite(v)) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "non-finite state at z = %.6g m (step %ld)", z, step);
        throw SimulationError(buf);
      }
  };

  const bool rk4 = options.solver == SolverKind::RK4;
  bool fsal_ready = false;
  record(0, 0.0);
  for (long step = 0; step < nsteps; ++step) {
    const double z = h * static_cast<double>(step);
    if (rk4) {
      auto& k1 = ws.stage[0];
      auto& k2 = ws.stage[1];
      auto& k3 = ws.stage[2];
      auto& k4 = ws.stage[3];
      auto& yt = ws.y_tmp;
      eval_rhs(z, y.data(), k1.data(), ws);
      for (std::size_t i = 0; i < len; ++i) yt[i] = y[i] + 0.5 * h * k1[i];
      eval_rhs(z + 0.5 * h, yt.data(), k2.data(), ws);
      for (std::size_t i = 0; i < len; ++i) yt[i] = y[i] + 0.5 * h * k2[i];
      eval_rhs(z + 0.5 * h, yt.data(), k3.data(), ws);
      for (std::size_t i = 0; i < len; ++i) yt[i] = y[i] + h * k3[i];
      eval_rhs(z + h, yt.data(), k4.data(), ws);
      for (std::size_t i = 0; i < len; ++i)
        y[i] += h / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
    } else {
      auto& yt = ws.y_tmp;
      if (!fsal_ready) {
        eval_rhs(z, y.data(), ws.stage[0].data(), ws);
        fsal_ready = true;
      }
      for (int s = 1; s < 7; ++s) {
        for (std::size_t i = 0; i < len; ++i) {
          double acc = 0;
          for (int j = 0; j < s; ++j) acc += kDpA[s][j] * ws.stage[j][i];
          yt[i] = y[i] + h * acc;
        }
        eval_rhs(z + kDpC[s] * h, yt.data(), ws.stage[s].data(), ws);
      }
      // 5th-order solution is stage row 7 of A; stage[6] is its derivative.
      double err = 0;
      for (std::size_t i = 0; i < len; ++i) {
        double e4 = 0;
        for (int j = 0; j < 7; ++j) e4 += kDpB4[j] * ws.stage[j][i];
        double y5 = 0;
        for (int j = 0; j < 6; ++j) y5 += kDpA[6][j] * ws.stage[j][i];
        const double ynew = y[i] + h * y5;
        err = std::max(err, std::abs((y[i] + h * e4) - ynew));
        ws.y_err[i] = ynew;
      }
      trace.max_embedded_error = std::max(trace.max_embedded_error, err);
      std::swap(y, ws.y_err);
      std::swap(ws.stage[0], ws.stage[6]);  // first-same-as-last
    }
    const double z_next = h * static_cast<double>(step + 1);
    check_finite(step + 1, z_next);
    if ((step + 1) % stride == 0 || step + 1 == nsteps)
      record(step + 1, step + 1 == nsteps ? length : z_next);
  }
  return trace;
}

OdeCheckReport per_mode_power_ode_check(const PowerTrace& trace,
                                        const CmtSystem& system) {
  if (!trace.has_states())
    throw SimulationError("ode check requires a trace with stored states");
  const int m = trace.mode_count;
  OdeCheckReport report;
  report.per_mode.assign(m, 0.0);
  const auto& modes = system.disc().family.modes;
  for (std::size_t k = 1; k + 1 < trace.samples(); ++k) {
    const double h1 = trace.z[k + 1] - trace.z[k];
    const double h2 = trace.z[k] - trace.z[k - 1];
    const StateVector state = trace.state_at(k);
    const CouplingMatrix km = system.coupling_matrix(trace.z[k], state);
    // a_l = A_l e^{i beta_l z}; only phase differences matter in rho.
    std::vector<std::complex<double>> a(m);
    for (int l = 0; l < m; ++l) {
      const double arg = (modes[l].beta - modes[0].beta) * trace.z[k];
      a[l] = state.amplitudes[l] *
             std::complex<double>{std::cos(arg), std::sin(arg)};
    }
    for (int l = 0; l < m; ++l) {
      // Non-uniform central difference of P_l.
      const double pm = trace.mode_at(k - 1, l);
      const double p0 = trace.mode_at(k, l);
      const double pp = trace.mode_at(k + 1, l);
      const double dpdz =
          (h2 * h2 * pp + (h1 * h1 - h2 * h2) * p0 - h1 * h1 * pm) /
          (h1 * h2 * (h1 + h2));
      double rho = 0;
      for (int j = 0; j < m; ++j) {
        if (j == l) continue;
        rho += 2.0 * (km.at(l, j) * std::conj(a[l]) * a[j]).real();
      }
      const double resid =
          dpdz - (2.0 * km.at(l, l).real() * p0 + rho);
      report.per_mode[l] = std::max(report.per_mode[l], std::abs(resid));
      report.max_residual = std::max(report.max_residual, std::abs(resid));
    }
  }
  return report;
}

}  // namespace fiberamp
