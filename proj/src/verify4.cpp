#include "wegner/verify4.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "wegner/spectra.hpp"

namespace wegner {

namespace {

constexpr double kRealTol = 1e-12;

void require_real4(const hermitian_matrix& h) {
  if (h.size() != 4) throw dimension_unsupported("reduced variables are defined for 4x4 only");
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (std::fabs(h.at(i, j).imag()) > kRealTol * std::max(1.0, std::abs(h.at(i, j))))
        throw not_real_symmetric("matrix has a complex off-diagonal entry");
}

// Householder QR least squares; a is row-major m x n with m >= n.  Writes the
// ratio of extreme |R_kk| (a conditioning bound) when requested.
std::vector<double> solve_least_squares(std::vector<double> a, std::vector<double> y, int m,
                                        int n, double* condition) {
  for (int k = 0; k < n; ++k) {
    double norm = 0.0;
    for (int i = k; i < m; ++i) norm = std::hypot(norm, a[i * n + k]);
    if (norm == 0.0) throw calibration_error("exponential design matrix is rank deficient");
    const double alpha = a[k * n + k] > 0.0 ? -norm : norm;
    std::vector<double> v(m - k);
    v[0] = a[k * n + k] - alpha;
    for (int i = k + 1; i < m; ++i) v[i - k] = a[i * n + k];
    double vnorm2 = 0.0;
    for (double t : v) vnorm2 += t * t;
    if (vnorm2 > 0.0) {
      for (int j = k; j < n; ++j) {
        double dot = 0.0;
        for (int i = k; i < m; ++i) dot += v[i - k] * a[i * n + j];
        const double f = 2.0 * dot / vnorm2;
        for (int i = k; i < m; ++i) a[i * n + j] -= f * v[i - k];
      }
      double dot = 0.0;
      for (int i = k; i < m; ++i) dot += v[i - k] * y[i];
      const double f = 2.0 * dot / vnorm2;
      for (int i = k; i < m; ++i) y[i] -= f * v[i - k];
    }
  }
  if (condition) {
    double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
      const double r = std::fabs(a[k * n + k]);
      rmax = std::max(rmax, r);
      rmin = std::min(rmin, r);
    }
    *condition = rmin > 0.0 ? rmax / rmin : std::numeric_limits<double>::infinity();
  }
  std::vector<double> x(n);
  for (int k = n - 1; k >= 0; --k) {
    double acc = y[k];
    for (int j = k + 1; j < n; ++j) acc -= a[k * n + j] * x[j];
    const double diag = a[k * n + k];
    if (diag == 0.0) throw calibration_error("exponential design matrix is rank deficient");
    x[k] = acc / diag;
  }
  return x;
}

std::vector<double> dedup_sorted(std::vector<double> xs, double tol) {
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  for (double x : xs) {
    if (out.empty() || x - out.back() > tol) out.push_back(x);
  }
  return out;
}

double rel_drift(const std::vector<double>& curve) {
  const double ref = curve.front();
  double dev = 0.0;
  for (double v : curve) dev = std::max(dev, std::fabs(v - ref));
  return dev / std::max(std::fabs(ref), 1e-300);
}

// Measured (log eta_k)' at each sample: 2 sum_{j<=k} (a_j - trace/4).
std::array<std::vector<double>, 3> log_derivative_rates(const flow_trajectory& traj,
                                                        double trace) {
  std::array<std::vector<double>, 3> rates;
  const int m = static_cast<int>(traj.samples.size());
  for (auto& r : rates) r.resize(m);
  for (int i = 0; i < m; ++i) {
    const hermitian_matrix& h = traj.samples[i].state;
    double acc = 0.0;
    for (int k = 0; k < 3; ++k) {
      acc += h.at(k, k).real() - trace / 4.0;
      rates[k][i] = 2.0 * acc;
    }
  }
  return rates;
}

// Log-spaced subset of grid indices covering (0, limit], always with 0 first.
std::vector<int> log_spaced_indices(const std::vector<double>& s, int last, int want) {
  std::vector<int> idx{0};
  if (last < 1) return idx;
  const double lo = s[1] > 0.0 ? s[1] : 1e-6;
  const double hi = s[last];
  for (int q = 0; q < want; ++q) {
    const double target = lo * std::pow(hi / lo, q / static_cast<double>(want - 1));
    const auto it = std::lower_bound(s.begin(), s.begin() + last + 1, target);
    int i = static_cast<int>(it - s.begin());
    i = std::min(i, last);
    if (i != idx.back()) idx.push_back(i);
  }
  if (idx.back() != last) idx.push_back(last);
  return idx;
}

struct curve_model {
  exp_sum fitted;
  exp_sum fitted_tilde;
  bool usable = false;
  double misfit = 0.0;
  double condition = 0.0;
};

curve_model fit_curve(const std::vector<double>& s, const std::vector<double>& y,
                      const std::vector<int>& idx, const std::vector<double>& basis) {
  curve_model cm;
  const int n = static_cast<int>(basis.size());
  const int m = static_cast<int>(idx.size());
  if (m < n + 2) return cm;
  std::vector<double> a(static_cast<size_t>(m) * n), rhs(m);
  for (int r = 0; r < m; ++r) {
    rhs[r] = y[idx[r]];
    for (int j = 0; j < n; ++j) a[static_cast<size_t>(r) * n + j] = std::exp(basis[j] * s[idx[r]]);
  }
  std::vector<double> coefs;
  try {
    coefs = solve_least_squares(std::move(a), rhs, m, n, &cm.condition);
  } catch (const calibration_error&) {
    return cm;
  }
  std::vector<exp_term> terms(n);
  for (int j = 0; j < n; ++j) terms[j] = {coefs[j], basis[j]};
  cm.fitted = exp_sum(std::move(terms));
  double num2 = 0.0, den2 = 0.0;
  for (int r = 0; r < m; ++r) {
    const double d = cm.fitted.eval(s[idx[r]]) - rhs[r];
    num2 += d * d;
    den2 += rhs[r] * rhs[r];
  }
  cm.misfit = den2 > 0.0 ? std::sqrt(num2 / den2) : 0.0;
  cm.fitted_tilde = cm.fitted.tilde();
  cm.usable = cm.condition <= 1e7 && cm.misfit <= 1e-5;
  return cm;
}

residual4_report residuals_core(const hermitian_matrix& h0, const integration_plan& plan,
                                bool gate_deltas) {
  const flow_trajectory traj = integrate(h0, plan);
  const eta_curves4 curves = reconstruct_etas(traj);
  const int m = static_cast<int>(curves.s.size());
  const auto rates = log_derivative_rates(traj, curves.trace);

  const spectrum sp = eigh(h0);
  const std::vector<double> u = exponents(sp, curves.trace);
  double umax = 0.0;
  for (double v : u) umax = std::max(umax, std::fabs(v));
  std::vector<double> basis1, basis2, basis3;
  for (int i = 0; i < 4; ++i) {
    basis1.push_back(u[i]);
    basis3.push_back(-u[i]);
    for (int j = i + 1; j < 4; ++j) basis2.push_back(u[i] + u[j]);
  }
  const double utol = 1e-9 * std::max(1.0, umax);
  basis1 = dedup_sorted(basis1, utol);
  basis2 = dedup_sorted(basis2, utol);
  basis3 = dedup_sorted(basis3, utol);

  // Fit over [0, 3/max|u|] with log-spaced samples (conditioning).
  const double window = umax > 0.0 ? 3.0 / umax : curves.s.back();
  int last = m - 1;
  while (last > 0 && curves.s[last] > window) --last;
  last = std::max(last, std::min(m - 1, 16));
  const std::vector<int> fit_idx = log_spaced_indices(curves.s, last, 80);

  residual4_report rep;
  rep.deltas_gated = gate_deltas;

  const std::array<const std::vector<double>*, 3> bases = {&basis1, &basis2, &basis3};
  std::array<curve_model, 3> model;
  for (int k = 0; k < 3; ++k) {
    model[k] = fit_curve(curves.s, curves.eta[k], fit_idx, *bases[k]);
    rep.fit_condition = std::max(rep.fit_condition, model[k].condition);
  }
  rep.eta2_fit_residual = model[1].misfit;

  // Uniform spacing is needed for the stencil fallback.
  double h = m > 1 ? curves.s[1] - curves.s[0] : 0.0;
  bool uniform = m > 4;
  for (int i = 1; i < m && uniform; ++i)
    uniform = std::fabs((curves.s[i] - curves.s[i - 1]) - h) <= 1e-9 * std::max(h, 1e-12);

  std::vector<double> gamma_product(m);
  std::array<std::vector<double>, 2> delta_ratio;
  delta_ratio[0].resize(m);
  delta_ratio[1].resize(m);
  std::array<double, 3> beta_dev{}, beta_scale{}, rho_dev{}, rho_scale{}, rho_neg{};
  std::array<int, 3> evaluated{};
  for (int i = 0; i < m; ++i) {
    const reduced_vars4 r = reduced4(traj.samples[i].state);
    const double e1 = curves.eta[0][i], e2 = curves.eta[1][i], e3 = curves.eta[2][i];
    gamma_product[i] = r.gamma * e1 * e3;
    delta_ratio[0][i] = r.delta[0] * e1 * e2 / e3;
    delta_ratio[1][i] = r.delta[1] * e2 * e3 / e1;
    if (i > last) continue;
    const std::array<double, 3> lhs = {r.beta[0] + r.delta[0] + r.gamma,
                                       r.beta[1] + r.delta[0] + r.delta[1] + r.gamma,
                                       r.beta[2] + r.delta[1] + r.gamma};
    const std::array<double, 3> etas = {e1, e2, e3};
    for (int k = 0; k < 3; ++k) {
      double rhs;
      if (model[k].usable) {
        const double mv = model[k].fitted.eval(curves.s[i]);
        rhs = model[k].fitted_tilde.eval(curves.s[i]) / (4.0 * mv * mv);
      } else if (uniform && i >= 2 && i + 2 < m) {
        const std::vector<double>& rt = rates[k];
        rhs = (-rt[i + 2] + 8.0 * rt[i + 1] - 8.0 * rt[i - 1] + rt[i - 2]) / (12.0 * h) / 4.0;
      } else {
        continue;
      }
      ++evaluated[k];
      beta_dev[k] = std::max(beta_dev[k], std::fabs(lhs[k] - rhs));
      beta_scale[k] = std::max({beta_scale[k], std::fabs(lhs[k]), std::fabs(rhs)});
      const double cleared = 4.0 * etas[k] * etas[k] * lhs[k];
      const double tk = 4.0 * etas[k] * etas[k] * rhs;
      rho_dev[k] = std::max(rho_dev[k], std::fabs(cleared - tk));
      rho_scale[k] = std::max({rho_scale[k], std::fabs(cleared), std::fabs(tk)});
      rho_neg[k] = std::max(rho_neg[k], -tk);
    }
  }
  rep.gamma_product_drift = rel_drift(gamma_product);
  if (gate_deltas) {
    rep.delta_ratio_drift[0] = rel_drift(delta_ratio[0]);
    rep.delta_ratio_drift[1] = rel_drift(delta_ratio[1]);
  }
  for (int k = 0; k < 3; ++k) {
    if (evaluated[k] == 0)
      throw too_sparse("no usable samples for the tilde expression of a profile");
    rep.beta_residuals[k] = beta_dev[k] / std::max(beta_scale[k], 1e-300);
    rep.rho_condition_residuals[k] =
        (rho_dev[k] + std::max(rho_neg[k], 0.0)) / std::max(rho_scale[k], 1e-300);
  }
  return rep;
}

}  // namespace

reduced_vars4 reduced4(const hermitian_matrix& h) {
  require_real4(h);
  reduced_vars4 r;
  for (int k = 0; k < 3; ++k) {
    r.z[k] = h.at(k, k).real() - h.at(k + 1, k + 1).real();
    const double b = h.at(k, k + 1).real();
    r.beta[k] = b * b;
  }
  for (int k = 0; k < 2; ++k) {
    const double d = h.at(k, k + 2).real();
    r.delta[k] = d * d;
  }
  const double g = h.at(0, 3).real();
  r.gamma = g * g;
  return r;
}

eta_curves4 reconstruct_etas(const flow_trajectory& traj) {
  if (traj.samples.empty()) throw too_sparse("trajectory has no samples");
  require_real4(traj.samples.front().state);
  const int m = static_cast<int>(traj.samples.size());
  if (m < 8) throw too_sparse("too few samples to reconstruct order profiles");
  for (int i = 1; i < m; ++i) {
    if (traj.samples[i].s - traj.samples[i - 1].s > 1.0 / 200.0 + 1e-12)
      throw too_sparse("sample spacing exceeds 1/200 flow-time units");
  }
  eta_curves4 out;
  out.trace = traj.samples.front().state.trace();
  out.s.resize(m);
  for (auto& e : out.eta) e.assign(m, 1.0);
  const auto rates = log_derivative_rates(traj, out.trace);
  // (log eta_k)' = 2 sum_{j<=k} (a_j - trace/4); trapezoid in log space.
  std::array<double, 3> logeta{};
  for (int i = 0; i < m; ++i) {
    out.s[i] = traj.samples[i].s;
    if (i > 0) {
      const double ds = out.s[i] - out.s[i - 1];
      for (int k = 0; k < 3; ++k) {
        logeta[k] += 0.5 * ds * (rates[k][i - 1] + rates[k][i]);
        out.eta[k][i] = std::exp(logeta[k]);
      }
    }
  }
  return out;
}

exp_sum fit_exponential_basis(const std::vector<double>& s, const std::vector<double>& y,
                              const std::vector<double>& basis_exponents) {
  const int m = static_cast<int>(s.size());
  const int n = static_cast<int>(basis_exponents.size());
  if (m != static_cast<int>(y.size())) throw flow_error("sample and value counts differ");
  if (n == 0) throw flow_error("empty exponential basis");
  if (m < n) throw too_sparse("fewer samples than basis exponentials");
  std::vector<double> a(static_cast<size_t>(m) * n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const double arg = basis_exponents[j] * s[i];
      if (std::fabs(arg) > exp_sum::exp_arg_limit)
        throw overflow_error("basis exponential overflows on the fit window");
      a[static_cast<size_t>(i) * n + j] = std::exp(arg);
    }
  }
  const std::vector<double> coefs = solve_least_squares(std::move(a), y, m, n, nullptr);
  std::vector<exp_term> terms(n);
  for (int j = 0; j < n; ++j) terms[j] = {coefs[j], basis_exponents[j]};
  return exp_sum(std::move(terms));
}

integration_plan default_verify4_plan(const hermitian_matrix& h0) {
  const spectrum sp = eigh(h0);
  const std::vector<double> u = exponents(sp, h0.trace());
  double umax = 0.0;
  for (double v : u) umax = std::max(umax, std::fabs(v));
  const double s_max = std::clamp(umax > 0.0 ? 4.0 / umax : 2.0, 0.5, 2.0);
  const int segments = static_cast<int>(std::ceil(s_max * 1600.0));
  return make_uniform_plan(s_max, 4 * segments, segments + 1, generator_kind::mielke);
}

residual4_report residuals_g0zero(const hermitian_matrix& h0, const integration_plan& plan) {
  require_real4(h0);
  if (std::abs(h0.at(0, 3)) > 1e-12)
    throw flow_error("corner entry must vanish for the gated residual check");
  return residuals_core(h0, plan, true);
}

residual4_report residuals_general(const hermitian_matrix& h0, const integration_plan& plan) {
  require_real4(h0);
  return residuals_core(h0, plan, false);
}

}  // namespace wegner
