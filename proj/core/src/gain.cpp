#include "fiberamp/gain.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fiberamp {

double photon_flux(double irradiance, double omega) {
  return irradiance / (PhysicalConstants::hbar * omega);
}

TmCoefficients tm_coefficients(const TmDopantSpec& d, double i_s, double i_p,
                               double omega_s, double omega_p) {
  TmCoefficients c;
  c.nu_s = photon_flux(i_s, omega_s);
  c.nu_p = photon_flux(i_p, omega_p);
  c.psi_abs_s = d.sigma_abs_s * c.nu_s;
  c.psi_ems_s = d.sigma_ems_s * c.nu_s;
  c.psi_abs_p = d.sigma_abs_p * c.nu_p;
  c.psi_ems_p = d.sigma_ems_p * c.nu_p;
  c.delta_1 = 1.0 / d.tau_10 + d.Gamma_1;
  c.delta_2 = 1.0 / d.tau_21 + 1.0 / d.tau_20 + d.Gamma_2;
  c.delta_3 = 1.0 / d.tau_32 + 1.0 / d.tau_31 + 1.0 / d.tau_30 + d.Gamma_3;
  c.gamma_0 = 1.0 / (c.psi_ems_p + c.delta_3);
  c.gamma_1 = c.psi_abs_p * c.gamma_0;
  c.gamma_2 = (1.0 / d.tau_32 + d.Gamma_3) / c.delta_2;
  const double q21 = 1.0 / d.tau_21 + d.Gamma_2;
  const double inv_d1 = 1.0 / (c.psi_ems_s + c.delta_1);
  c.gamma_13 = (c.gamma_1 * (1.0 / d.tau_31 + c.gamma_2 * q21) + c.psi_abs_s) *
               inv_d1;
  c.gamma_14 = c.gamma_0 * (2.0 * c.psi_abs_p + c.psi_abs_s) * inv_d1;
  c.gamma_3 = c.gamma_13 / c.gamma_1;  // inf at zero pump, by convention
  c.gamma_4 = c.gamma_14 / c.gamma_1;
  return c;
}

TmGainModel::TmGainModel(const TmDopantSpec& dopant, double omega_s,
                         double omega_p)
    : d_(dopant),
      inv_hw_s_(1.0 / (PhysicalConstants::hbar * omega_s)),
      inv_hw_p_(1.0 / (PhysicalConstants::hbar * omega_p)) {
  delta_1_ = 1.0 / d_.tau_10 + d_.Gamma_1;
  delta_2_ = 1.0 / d_.tau_21 + 1.0 / d_.tau_20 + d_.Gamma_2;
  delta_3_ = 1.0 / d_.tau_32 + 1.0 / d_.tau_31 + 1.0 / d_.tau_30 + d_.Gamma_3;
  gamma_2_ = (1.0 / d_.tau_32 + d_.Gamma_3) / delta_2_;
  q21_ = 1.0 / d_.tau_21 + d_.Gamma_2;
  r31_ = 1.0 / d_.tau_31;
  c31_ = r31_ + gamma_2_ * q21_;
}

TmPopulations TmGainModel::populations(double i_s, double i_p) const {
  const double nt = d_.n_total;
  const double kr = d_.kappa_r;
  const double psi_ap = d_.sigma_abs_p * i_p * inv_hw_p_;
  const double psi_ep = d_.sigma_ems_p * i_p * inv_hw_p_;
  const double psi_as = d_.sigma_abs_s * i_s * inv_hw_s_;
  const double psi_es = d_.sigma_ems_s * i_s * inv_hw_s_;
  const double g0 = 1.0 / (psi_ep + delta_3_);
  const double g1 = psi_ap * g0;
  const double inv_d = 1.0 / (psi_es + delta_1_);
  // Products gamma_1*gamma_3 and gamma_1*gamma_4 stay finite as the pump
  // flux vanishes, unlike gamma_3 and gamma_4 themselves.
  const double g13 = (g1 * c31_ + psi_as) * inv_d;
  const double g14 = g0 * (2.0 * psi_ap + psi_as) * inv_d;
  // Conservation yields a quadratic for N0: a N0^2 + b N0 - N_total = 0.
  const double a = kr * (g0 + g14);
  const double b = 1.0 + g1 * (1.0 + gamma_2_) + g13 - g0 * kr * nt;
  const double disc = std::sqrt(b * b + 4.0 * a * nt);
  // Since a N_t >= g0 kr N_t, one has b + disc >= 2: the rational root form
  // never cancels, and it covers a = 0.
  const double n0 = 2.0 * nt / (b + disc);
  const double den = 1.0 / (1.0 + g0 * kr * n0);
  const double n3 = g1 * n0 * den;
  const double n2 = gamma_2_ * n3;
  const double n1 = (psi_as * n0 + (q21_ * gamma_2_ + r31_ + 2.0 * kr * n0) * n3) *
                    inv_d;
  return {n0, n1, n2, n3};
}

GainSample TmGainModel::gains(double i_s, double i_p) const {
  const TmPopulations p = populations(i_s, i_p);
  return {d_.sigma_ems_s * p.n1 - d_.sigma_abs_s * p.n0,
          d_.sigma_ems_p * p.n3 - d_.sigma_abs_p * p.n0};
}

void TmGainModel::gains_batch(std::span<const double> i_s, double i_p,
                              std::span<double> g_s,
                              std::span<double> g_p) const {
  const double nt = d_.n_total;
  const double kr = d_.kappa_r;
  const double psi_ap = d_.sigma_abs_p * i_p * inv_hw_p_;
  const double psi_ep = d_.sigma_ems_p * i_p * inv_hw_p_;
  const double g0 = 1.0 / (psi_ep + delta_3_);
  const double g1 = psi_ap * g0;
  const double b_base = 1.0 + g1 * (1.0 + gamma_2_) - g0 * kr * nt;
  const double g1c31 = g1 * c31_;
  const double sas = d_.sigma_abs_s * inv_hw_s_;
  const double ses = d_.sigma_ems_s * inv_hw_s_;
  const double d1 = delta_1_, g2 = gamma_2_, q21 = q21_, r31 = r31_;
  const double sigma_es = d_.sigma_ems_s, sigma_as = d_.sigma_abs_s;
  const double sigma_ep = d_.sigma_ems_p, sigma_ap = d_.sigma_abs_p;
  const std::size_t n = i_s.size();
  const double* __restrict is = i_s.data();
  double* __restrict gs = g_s.data();
  double* __restrict gp = g_p.data();
  for (std::size_t q = 0; q < n; ++q) {
    const double psi_as = sas * is[q];
    const double psi_es = ses * is[q];
    const double inv_d = 1.0 / (psi_es + d1);
    const double g13 = (g1c31 + psi_as) * inv_d;
    const double g14 = g0 * (2.0 * psi_ap + psi_as) * inv_d;
    const double a = kr * (g0 + g14);
    const double b = b_base + g13;
    const double disc = std::sqrt(b * b + 4.0 * a * nt);
    const double n0 = 2.0 * nt / (b + disc);
    const double den = 1.0 / (1.0 + g0 * kr * n0);
    const double n3 = g1 * n0 * den;
    const double n1 = (psi_as * n0 + (q21 * g2 + r31 + 2.0 * kr * n0) * n3) *
                      inv_d;
    gs[q] = sigma_es * n1 - sigma_as * n0;
    gp[q] = sigma_ep * n3 - sigma_ap * n0;
  }
}

TmPopulations tm_steady_state(double i_s, double i_p,
                              const TmDopantSpec& dopant, double omega_s,
                              double omega_p) {
  return TmGainModel(dopant, omega_s, omega_p).populations(i_s, i_p);
}

GainSample tm_gain(const TmPopulations& p, const TmDopantSpec& d) {
  return {d.sigma_ems_s * p.n1 - d.sigma_abs_s * p.n0,
          d.sigma_ems_p * p.n3 - d.sigma_abs_p * p.n0};
}

YbGainModel::YbGainModel(const YbDopantSpec& dopant, double omega_s,
                         double omega_p)
    : d_(dopant),
      inv_hw_s_(1.0 / (PhysicalConstants::hbar * omega_s)),
      inv_hw_p_(1.0 / (PhysicalConstants::hbar * omega_p)) {}

YbPopulations YbGainModel::populations(double i_s, double i_p) const {
  const double psi_as = d_.sigma_abs_s * i_s * inv_hw_s_;
  const double psi_es = d_.sigma_ems_s * i_s * inv_hw_s_;
  const double psi_ap = d_.sigma_abs_p * i_p * inv_hw_p_;
  const double psi_ep = d_.sigma_ems_p * i_p * inv_hw_p_;
  const double excited = d_.n_total * (psi_as + psi_ap) /
                         (psi_as + psi_es + psi_ap + psi_ep + 1.0 / d_.tau);
  return {d_.n_total - excited, excited};
}

GainSample YbGainModel::gains(double i_s, double i_p) const {
  const YbPopulations p = populations(i_s, i_p);
  return {d_.sigma_ems_s * p.excited - d_.sigma_abs_s * p.ground,
          d_.sigma_ems_p * p.excited - d_.sigma_abs_p * p.ground};
}

void YbGainModel::gains_batch(std::span<const double> i_s, double i_p,
                              std::span<double> g_s,
                              std::span<double> g_p) const {
  const double sas = d_.sigma_abs_s * inv_hw_s_;
  const double ses = d_.sigma_ems_s * inv_hw_s_;
  const double psi_ap = d_.sigma_abs_p * i_p * inv_hw_p_;
  const double psi_ep = d_.sigma_ems_p * i_p * inv_hw_p_;
  const double inv_tau = 1.0 / d_.tau;
  const double nt = d_.n_total;
  const double sigma_es = d_.sigma_ems_s, sigma_as = d_.sigma_abs_s;
  const double sigma_ep = d_.sigma_ems_p, sigma_ap = d_.sigma_abs_p;
  const std::size_t n = i_s.size();
  const double* __restrict is = i_s.data();
  double* __restrict gs = g_s.data();
  double* __restrict gp = g_p.data();
  for (std::size_t q = 0; q < n; ++q) {
    const double psi_as = sas * is[q];
    const double psi_es = ses * is[q];
    const double excited =
        nt * (psi_as + psi_ap) / (psi_as + psi_es + psi_ap + psi_ep + inv_tau);
    const double ground = nt - excited;
    gs[q] = sigma_es * excited - sigma_as * ground;
    gp[q] = sigma_ep * excited - sigma_ap * ground;
  }
}

YbPopulations yb_steady_state(double i_s, double i_p,
                              const YbDopantSpec& dopant, double omega_s,
                              double omega_p) {
  return YbGainModel(dopant, omega_s, omega_p).populations(i_s, i_p);
}

GainSample yb_gain(const YbPopulations& p, const YbDopantSpec& d) {
  return {d.sigma_ems_s * p.excited - d.sigma_abs_s * p.ground,
          d.sigma_ems_p * p.excited - d.sigma_abs_p * p.ground};
}

namespace {

// Solve the n x n system in place by Gaussian elimination with partial
// pivoting; rhs is overwritten with the solution.
template <int N>
void solve_dense(std::array<std::array<double, N>, N>& a,
                 std::array<double, N>& rhs) {
  for (int col = 0; col < N; ++col) {
    int piv = col;
    for (int row = col + 1; row < N; ++row)
      if (std::abs(a[row][col]) > std::abs(a[piv][col])) piv = row;
    std::swap(a[col], a[piv]);
    std::swap(rhs[col], rhs[piv]);
    if (a[col][col] == 0.0) throw std::runtime_error("singular Jacobian");
    const double inv = 1.0 / a[col][col];
    for (int row = col + 1; row < N; ++row) {
      const double f = a[row][col] * inv;
      if (f == 0.0) continue;
      for (int k = col; k < N; ++k) a[row][k] -= f * a[col][k];
      rhs[row] -= f * rhs[col];
    }
  }
  for (int row = N - 1; row >= 0; --row) {
    double s = rhs[row];
    for (int k = row + 1; k < N; ++k) s -= a[row][k] * rhs[k];
    rhs[row] = s / a[row][row];
  }
}

template <int N, class Residual, class Jacobian>
std::array<double, N> damped_newton(std::array<double, N> x,
                                    Residual residual, Jacobian jacobian,
                                    double tol_abs, double tol_floor,
                                    int max_iterations) {
  auto norm = [](const std::array<double, N>& v) {
    double m = 0;
    for (double c : v) m = std::max(m, std::abs(c));
    return m;
  };
  std::array<double, N> f = residual(x);
  double fn = norm(f);
  for (int it = 0; it < max_iterations; ++it) {
    if (fn <= tol_abs) return x;
    std::array<std::array<double, N>, N> jac = jacobian(x);
    std::array<double, N> step = f;
    solve_dense<N>(jac, step);
    double lambda = 1.0;
    bool improved = false;
    for (int cut = 0; cut < 60; ++cut) {
      std::array<double, N> trial = x;
      for (int k = 0; k < N; ++k) trial[k] -= lambda * step[k];
      std::array<double, N> ft = residual(trial);
      const double ftn = norm(ft);
      if (ftn < fn || ftn <= tol_abs) {
        x = trial;
        f = ft;
        fn = ftn;
        improved = true;
        break;
      }
      lambda *= 0.5;  // damp on residual increase
    }
    // The residual can bottom out in rounding noise above tol_abs; accept
    // once it is below the loose floor and no step improves it.
    if (!improved) {
      if (fn <= tol_floor) return x;
      throw std::runtime_error("Newton line search stalled");
    }
  }
  if (fn <= tol_floor) return x;
  throw std::runtime_error("rate-equation oracle did not converge");
}

}  // namespace

TmPopulations tm_rate_oracle(double i_s, double i_p, const TmDopantSpec& d,
                             double omega_s, double omega_p,
                             const OracleOptions& opt) {
  const double psi_as = d.sigma_abs_s * photon_flux(i_s, omega_s);
  const double psi_es = d.sigma_ems_s * photon_flux(i_s, omega_s);
  const double psi_ap = d.sigma_abs_p * photon_flux(i_p, omega_p);
  const double psi_ep = d.sigma_ems_p * photon_flux(i_p, omega_p);
  const double r32 = 1.0 / d.tau_32, r31 = 1.0 / d.tau_31,
               r30 = 1.0 / d.tau_30;
  const double r21 = 1.0 / d.tau_21, r20 = 1.0 / d.tau_20;
  const double r10 = 1.0 / d.tau_10;
  const double kr = d.kappa_r;
  const double nt = d.n_total;

  // Residual scale: concentrations times the fastest rate present.
  double max_rate = 1.0 / d.tau_32;
  for (double r : {psi_as, psi_es, psi_ap, psi_ep, r31, r30, r21, r20, r10,
                   d.Gamma_1, d.Gamma_2, d.Gamma_3, kr * nt})
    max_rate = std::max(max_rate, r);
  const double tol = opt.tolerance * nt * max_rate;

  auto residual = [&](const std::array<double, 4>& x) {
    const double n0 = x[0], n1 = x[1], n2 = x[2], n3 = x[3];
    return std::array<double, 4>{
        psi_ap * n0 - (psi_ep + r32 + r31 + r30 + d.Gamma_3 + kr * n0) * n3,
        (r32 + d.Gamma_3) * n3 - (r21 + r20 + d.Gamma_2) * n2,
        psi_as * n0 + (r21 + d.Gamma_2) * n2 + (r31 + 2.0 * kr * n0) * n3 -
            (r10 + d.Gamma_1 + psi_es) * n1,
        (n0 + n1 + n2 + n3 - nt) * max_rate};
  };
  auto jacobian = [&](const std::array<double, 4>& x) {
    const double n0 = x[0], n3 = x[3];
    std::array<std::array<double, 4>, 4> jac{};
    jac[0] = {psi_ap - kr * n3, 0.0, 0.0,
              -(psi_ep + r32 + r31 + r30 + d.Gamma_3 + kr * n0)};
    jac[1] = {0.0, 0.0, -(r21 + r20 + d.Gamma_2), r32 + d.Gamma_3};
    jac[2] = {psi_as + 2.0 * kr * n3, -(r10 + d.Gamma_1 + psi_es),
              r21 + d.Gamma_2, r31 + 2.0 * kr * n0};
    jac[3] = {max_rate, max_rate, max_rate, max_rate};
    return jac;
  };

  const auto x = damped_newton<4>({nt, 0.0, 0.0, 0.0}, residual, jacobian,
                                  tol, 1e4 * tol, opt.max_iterations);
  return {x[0], x[1], x[2], x[3]};
}

YbPopulations yb_rate_oracle(double i_s, double i_p, const YbDopantSpec& d,
                             double omega_s, double omega_p,
                             const OracleOptions& opt) {
  const double psi_as = d.sigma_abs_s * photon_flux(i_s, omega_s);
  const double psi_es = d.sigma_ems_s * photon_flux(i_s, omega_s);
  const double psi_ap = d.sigma_abs_p * photon_flux(i_p, omega_p);
  const double psi_ep = d.sigma_ems_p * photon_flux(i_p, omega_p);
  const double inv_tau = 1.0 / d.tau;
  const double nt = d.n_total;
  double max_rate = inv_tau;
  for (double r : {psi_as, psi_es, psi_ap, psi_ep})
    max_rate = std::max(max_rate, r);
  const double tol = opt.tolerance * nt * max_rate;

  auto residual = [&](const std::array<double, 2>& x) {
    return std::array<double, 2>{
        (psi_as + psi_ap) * x[0] - (psi_es + psi_ep + inv_tau) * x[1],
        (x[0] + x[1] - nt) * max_rate};
  };
  auto jacobian = [&](const std::array<double, 2>&) {
    std::array<std::array<double, 2>, 2> jac{};
    jac[0] = {psi_as + psi_ap, -(psi_es + psi_ep + inv_tau)};
    jac[1] = {max_rate, max_rate};
    return jac;
  };
  const auto x = damped_newton<2>({nt, 0.0}, residual, jacobian, tol,
                                  1e4 * tol, opt.max_iterations);
  return {x[0], x[1]};
}

GainModel make_gain_model(const DopantSpec& dopant, const FiberSpec& spec) {
  if (const auto* tm = std::get_if<TmDopantSpec>(&dopant))
    return TmGainModel(*tm, spec.omega_s(), spec.omega_p());
  return YbGainModel(std::get<YbDopantSpec>(dopant), spec.omega_s(),
                     spec.omega_p());
}

}  // namespace fiberamp
