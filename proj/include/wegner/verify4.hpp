#pragma once

#include <array>
#include <vector>

#include "wegner/expsum.hpp"
#include "wegner/flow_numeric.hpp"
#include "wegner/matrix.hpp"

namespace wegner {

// Reduced variables of the 4x4 real-symmetric flow: diagonal gaps, squared
// near-diagonal entries, squared second-diagonal entries, squared corner.
struct reduced_vars4 {
  std::array<double, 3> z{};      // a_k - a_{k+1}
  std::array<double, 3> beta{};   // b_k^2, first off-diagonal
  std::array<double, 2> delta{};  // d_k^2, second off-diagonal
  double gamma = 0.0;             // g^2, corner
};

// Throws dimension_unsupported (n != 4) or not_real_symmetric.
reduced_vars4 reduced4(const hermitian_matrix& h);

// Order profiles eta_1..eta_3 reconstructed from a numeric trajectory by
// cumulative trapezoid integration of the diagonal log-derivative relations
// (log eta_k)' = 2 sum_{j<=k} (a_j - trace/4), normalized to eta_k(0) = 1.
struct eta_curves4 {
  std::vector<double> s;
  std::array<std::vector<double>, 3> eta;
  double trace = 0.0;
};

// Requires sample spacing <= 1/200 flow-time units (too_sparse otherwise)
// and a real-symmetric 4x4 trajectory.
eta_curves4 reconstruct_etas(const flow_trajectory& traj);

// Least-squares fit of samples onto a fixed exponential basis
// sum_k c_k e^{x_k s} (QR on the design matrix).  Returns the fitted sum.
exp_sum fit_exponential_basis(const std::vector<double>& s, const std::vector<double>& y,
                              const std::vector<double>& basis_exponents);

// Residuals of the closed-chain structure measured on a numeric trajectory.
// All entries are finite and >= 0.  tilde(eta)/(4 eta^2) = (log eta)''/4
// enters the beta relations; it is taken from analytic differentiation of
// the fitted exponential model when the fit is well conditioned, otherwise
// from a 5-point central first difference of the measured log-derivative
// rates f'(x) ~ (-f(x+2h) + 8f(x+h) - 8f(x-h) + f(x-2h)) / (12h).  Either
// way it never comes from the flow equation itself (that would be circular).
struct residual4_report {
  // max_s |gamma eta1 eta3 - gamma(0)| / max(gamma(0), floor)
  double gamma_product_drift = 0.0;
  // max_s |delta_k * (ratio combo) - delta_k(0)| / max(delta_k(0), floor);
  // flow invariants only when the corner entry vanishes (deltas_gated).
  std::array<double, 2> delta_ratio_drift{};
  // max_s |beta_k + (delta terms)_k + gamma - (log eta_k)''/4| relative to
  // the larger side's scale, over the fit window.
  std::array<double, 3> beta_residuals{};
  // Same relations cleared of denominators (radicand form), plus negativity
  // of the radicand if any; relative to the cleared scale.
  std::array<double, 3> rho_condition_residuals{};
  // Relative L2 misfit of the eta_2 six-exponential fit on the fit window.
  double eta2_fit_residual = 0.0;
  // Conditioning bound of the basis fits: max over curves of the ratio of
  // extreme |R_kk| in the QR of the design matrix.
  double fit_condition = 0.0;
  bool deltas_gated = false;
};

// Reference step policy: window clamped to a few decay times of the fastest
// mode, sample spacing 1/1600, four integrator steps per sample.
integration_plan default_verify4_plan(const hermitian_matrix& h0);

// Corner entry must vanish (|g0| <= 1e-12); checks the specialized chain
// (delta ratio constants are genuine invariants here).
residual4_report residuals_g0zero(const hermitian_matrix& h0, const integration_plan& plan);

// Any real-symmetric 4x4 input; gamma-product constancy and beta relations.
residual4_report residuals_general(const hermitian_matrix& h0, const integration_plan& plan);

}  // namespace wegner
