#pragma once

#include <array>
#include <optional>

#include "wegner/expsum.hpp"
#include "wegner/matrix.hpp"
#include "wegner/spectra.hpp"

namespace wegner {

// Calibration constants of the closed 3x3 flow.  The two fundamental
// profiles are three-term exponential sums in canonical normalization
// (coefficient 1 on the -(u1+u2) resp. +(u1+u2) exponent):
//   eta1 = p11 e^{u1 s} + p12 e^{u2 s} + e^{-(u1+u2) s}
//   eta2 = p21 e^{-u1 s} + p22 e^{-u2 s} + e^{(u1+u2) s}
// When the spectrum has a repeated pair the degenerate branch replaces them
// with two-term profiles driven by the single exponent u_deg.
struct calibration3 {
  double u1 = 0.0;  // largest flow exponent
  double u2 = 0.0;  // smallest flow exponent
  double big_a = 0.0;
  double p11 = 0.0, p12 = 0.0;
  double p21 = 0.0, p22 = 0.0;
  bool degenerate = false;
  double u_deg = 0.0;
  double p1_deg = 0.0, p2_deg = 0.0;
};

// Signed coefficients of the off-diagonal profiles rho1 (exponents
// -u1, -u2, u1+u2) and rho2 (exponents u1, u2, -(u1+u2)), plus the profiles
// themselves.  Valid in the real-symmetric frame.
struct rho_profiles {
  exp_sum rho1;
  exp_sum rho2;
  std::array<double, 3> q1{};  // signed coefficients of rho1 in slot order above
  std::array<double, 3> q2{};  // signed coefficients of rho2
};

// Off-diagonal phase angles.
struct phase_triple {
  double phi_b = 0.0;
  double phi_c = 0.0;
  double phi_g = 0.0;
};

// Phase sector data for strictly nonaligned Hermitian input: the coupling
// constant and the initial angles.  c_const == 0 means the phases are frozen.
struct phase_state {
  double c_const = 0.0;
  double phi_b0 = 0.0;
  double phi_c0 = 0.0;
  double phi_g0 = 0.0;
};

enum class solve3_mode {
  constant_diagonal,   // off-diagonal-free input; flow is a fixed point
  signed_profiles,     // real-symmetric frame (possibly wrapped in constant phases)
  radicand_profiles,   // strictly nonaligned Hermitian: moduli from radicands
};

// Closed-form solution of dH/ds = [G(H), H] (band generator) for 3x3
// Hermitian H.  Evaluate with eval3(); phases with phase_at().
struct exact3_solution {
  double trace = 0.0;
  solve3_mode mode = solve3_mode::constant_diagonal;
  calibration3 cal;
  exp_sum eta1;
  exp_sum eta2;
  // signed_profiles mode
  exp_sum rho1;
  exp_sum rho2;
  int sign_g = 0;
  // radicand_profiles mode: rho_k^2 = tilde(eta_k)*eta_other - 4 A^2 eta_k
  exp_sum rho1_sq;
  exp_sum rho2_sq;
  std::optional<phase_state> phase;
  // Constant unitary frame exp(i theta_k) diagonal conjugation taking the
  // internal real-symmetric solution to the original entries (signed mode).
  std::array<double, 3> theta{};
  hermitian_matrix h0;  // kept for the constant mode and diagnostics
};

// Tolerances used by calibrate3's routing decisions.
struct calibrate3_options {
  // |u1+2u2| or |2u1+u2| vs max|u|: a repeated eigenvalue pair recovered from
  // the invariants splits by the square root of the coefficient roundoff
  // (~1e-8), so the threshold sits well above that.  Below it the closed-pair
  // model beats the generic branch, whose coefficients carry the inverse
  // square of the split.
  double degenerate_rel_tol = 3e-7;
  double align_tol = 1e-12;           // phase-alignment residual (radians)
  double zero_entry_tol = 1e-13;      // off-diagonal modulus, relative to scale
};

// Build the closed-form solution for a 3x3 Hermitian matrix.
// Throws top_pair_degenerate for the (unreachable) repeated-top-pair shape
// and calibration_error if interior positivity checks fail.
exact3_solution calibrate3(const hermitian_matrix& h0,
                           const calibrate3_options& opts = {});

// Signed off-diagonal profiles for the real-symmetric frame, from the
// calibration and the signed initial off-diagonal entries.  Per-term
// relative signs come from closed sign rules; each overall sign is fixed by
// the initial value of the corresponding entry.
rho_profiles make_rho_profiles(const calibration3& cal, double b0, double c0, double g0);

// State of the flow at time s (any real s inside double exp range).
hermitian_matrix eval3(const exact3_solution& sol, double s);

// Off-diagonal phases at time s.  Constant unless the solution is strictly
// nonaligned (radicand mode with c_const != 0), where the two non-corner
// phases follow quadratures of rational-exponential integrands.
phase_triple phase_at(const exact3_solution& sol, double s);

// Phases at many ascending flow times; quadratures accumulate segment by
// segment instead of restarting from zero at every point.
std::vector<phase_triple> phase_series(const exact3_solution& sol,
                                       const std::vector<double>& s_points);

// Closed-form solution of the 2x2 flow: single profile eta = p e^{u s} + e^{-u s}.
struct exact2_solution {
  double trace = 0.0;
  bool constant = false;  // vanishing off-diagonal: fixed point
  double u = 0.0;
  double p = 0.0;
  double big_a = 0.0;
  exp_sum eta;
  int sign_g = 0;
  double phi = 0.0;  // constant phase of the off-diagonal entry
  hermitian_matrix h0;
};

exact2_solution exact2x2(const hermitian_matrix& h0);
hermitian_matrix eval2(const exact2_solution& sol, double s);

}  // namespace wegner
