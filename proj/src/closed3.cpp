#include "wegner/closed3.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "wegner/quadrature.hpp"

namespace wegner {

namespace {

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }
int sign_nonzero(double x) { return x < 0.0 ? -1 : 1; }

double clamp_nonneg(double x, const char* what) {
  if (x < -1e-9 * std::max(1.0, std::fabs(x))) {
    char msg[128];
    std::snprintf(msg, sizeof msg, "%s came out negative (%.6g)", what, x);
    throw calibration_error(msg);
  }
  return std::max(x, 0.0);
}

// Diagonal phase frame exp(i theta_k) making every off-diagonal entry real,
// when one exists.  Entries at or below ztol carry no constraint.
struct phase_frame {
  std::array<double, 3> theta{};
  bool aligned = false;
  double b_real = 0.0, c_real = 0.0, g_real = 0.0;  // signed real-frame values
};

phase_frame solve_phase_frame(const hermitian_matrix& h, double ztol, double align_tol) {
  const complexd hb = h.at(0, 1), hg = h.at(0, 2), hc = h.at(1, 2);
  const bool eb = std::abs(hb) > ztol, eg = std::abs(hg) > ztol, ec = std::abs(hc) > ztol;
  phase_frame fr;
  fr.theta[2] = 0.0;
  fr.theta[1] = ec ? std::arg(hc) : 0.0;
  fr.theta[0] = eg ? std::arg(hg) : (eb ? fr.theta[1] + std::arg(hb) : 0.0);
  const complexd rb = std::exp(complexd(0.0, -(fr.theta[0] - fr.theta[1]))) * hb;
  const complexd rc = std::exp(complexd(0.0, -(fr.theta[1] - fr.theta[2]))) * hc;
  const complexd rg = std::exp(complexd(0.0, -(fr.theta[0] - fr.theta[2]))) * hg;
  const double scale = std::max(1.0, h.frobenius_norm());
  fr.aligned = std::fabs(rb.imag()) <= align_tol * scale &&
               std::fabs(rc.imag()) <= align_tol * scale &&
               std::fabs(rg.imag()) <= align_tol * scale;
  fr.b_real = eb ? rb.real() : 0.0;
  fr.c_real = ec ? rc.real() : 0.0;
  fr.g_real = eg ? rg.real() : 0.0;
  return fr;
}

// Embed the closed 2x2 block solution into the 3x3 profile form.  block_lo /
// block_hi are the coupled indices; the third diagonal entry is a constant.
exact3_solution solve_decoupled_block(const hermitian_matrix& h0, const phase_frame& fr,
                                      int lo, int hi) {
  const double tr = h0.trace();
  const double third = tr / 3.0;
  const double alo = h0.at(lo, lo).real();
  const double ahi = h0.at(hi, hi).real();
  const double tr2 = alo + ahi;
  const double blk = std::abs(h0.at(lo, hi));  // block coupling modulus
  const double gap = alo - ahi;
  const double u = std::sqrt(gap * gap + 4.0 * blk * blk);
  const double p = (2.0 * blk * blk + gap * gap + gap * u) / (2.0 * blk * blk);
  const double a2 = u * std::sqrt(p);
  exp_sum eta_blk({{p, u}, {1.0, -u}});

  exact3_solution sol;
  sol.h0 = h0;
  sol.trace = tr;
  sol.mode = solve3_mode::signed_profiles;
  sol.theta = fr.theta;
  sol.cal.big_a = a2;
  sol.sign_g = 0;

  const double lift = tr2 - 2.0 * third;  // log-derivative offset absorbed into eta1
  if (lo == 0 && hi == 1) {
    // f constant; block spans (a, d, b).
    const double uf = 2.0 * (h0.at(2, 2).real() - third);
    sol.eta1 = eta_blk.times(exp_sum::single(1.0, lift));
    sol.eta2 = exp_sum::single(1.0, -uf);
    sol.rho1 = exp_sum::single(2.0 * sign_of(fr.b_real) * a2, -uf);
    sol.rho2 = exp_sum();
  } else if (lo == 1 && hi == 2) {
    // a constant; block spans (d, f, c).
    const double ua = 2.0 * (h0.at(0, 0).real() - third);
    sol.eta1 = exp_sum::single(1.0, ua);
    sol.eta2 = eta_blk.times(exp_sum::single(1.0, -lift));
    sol.rho1 = exp_sum();
    sol.rho2 = exp_sum::single(2.0 * sign_of(fr.c_real) * a2, ua);
  } else {
    // d constant; block spans (a, f, g).
    sol.eta1 = eta_blk.times(exp_sum::single(1.0, lift));
    sol.eta2 = eta_blk.times(exp_sum::single(1.0, -lift));
    sol.rho1 = exp_sum();
    sol.rho2 = exp_sum();
    sol.sign_g = sign_of(fr.g_real);
  }
  return sol;
}

struct generic_calibration_inputs {
  double a0, f0, i1;
  double bm2, cm2, gm2;  // squared off-diagonal moduli
};

calibration3 calibrate_generic(const generic_calibration_inputs& in, double u1, double u2) {
  const double a0 = in.a0, f0 = in.f0, i1 = in.i1;
  const double d1 = 36.0 * a0 * a0 + 36.0 * in.bm2 + 36.0 * in.gm2 + 6.0 * u1 * i1 +
                    4.0 * i1 * i1 + 9.0 * u1 * u2 + 6.0 * i1 * u2 -
                    6.0 * a0 * (3.0 * u1 + 4.0 * i1 + 3.0 * u2);
  const double d2 = 36.0 * f0 * f0 + 36.0 * in.cm2 + 36.0 * in.gm2 + 6.0 * u1 * i1 +
                    4.0 * i1 * i1 + 9.0 * u1 * u2 + 6.0 * i1 * u2 -
                    6.0 * f0 * (3.0 * u1 + 4.0 * i1 + 3.0 * u2);
  const double n11 = 36.0 * a0 * a0 + 36.0 * in.bm2 + 36.0 * in.gm2 - 24.0 * a0 * i1 +
                     4.0 * i1 * i1 - 9.0 * u1 * u2 + 18.0 * a0 * u1 - 6.0 * i1 * u1 -
                     9.0 * u2 * u2;
  const double n12 = -36.0 * a0 * a0 - 36.0 * in.bm2 - 36.0 * in.gm2 + 24.0 * a0 * i1 -
                     4.0 * i1 * i1 + 9.0 * u1 * u2 - 18.0 * a0 * u2 + 6.0 * i1 * u2 +
                     9.0 * u1 * u1;
  const double n21 = 36.0 * f0 * f0 + 36.0 * in.cm2 + 36.0 * in.gm2 - 24.0 * f0 * i1 +
                     4.0 * i1 * i1 - 9.0 * u1 * u2 + 18.0 * f0 * u1 - 6.0 * i1 * u1 -
                     9.0 * u2 * u2;
  const double n22 = -36.0 * f0 * f0 - 36.0 * in.cm2 - 36.0 * in.gm2 + 24.0 * f0 * i1 -
                     4.0 * i1 * i1 + 9.0 * u1 * u2 - 18.0 * f0 * u2 + 6.0 * i1 * u2 +
                     9.0 * u1 * u1;
  const double scale4 = std::pow(std::max({1.0, std::fabs(u1), std::fabs(u2), std::fabs(i1)}), 4);
  if (std::fabs(d1) <= 1e-14 * scale4 || std::fabs(d2) <= 1e-14 * scale4) {
    throw calibration_error("profile denominator vanished: input sits on a decoupling pole");
  }
  calibration3 cal;
  cal.u1 = u1;
  cal.u2 = u2;
  const double du = u1 - u2;
  cal.p11 = clamp_nonneg((u1 + 2.0 * u2) * n11 / (du * d1), "eta1 coefficient p11");
  cal.p12 = clamp_nonneg((2.0 * u1 + u2) * n12 / (du * d1), "eta1 coefficient p12");
  cal.p21 = clamp_nonneg((u1 + 2.0 * u2) * n21 / (du * d2), "eta2 coefficient p21");
  cal.p22 = clamp_nonneg((2.0 * u1 + u2) * n22 / (du * d2), "eta2 coefficient p22");
  const double d1d2 = d1 * d2;
  if (in.gm2 > 0.0 && d1d2 <= 0.0) {
    throw calibration_error("amplitude radicand d1*d2 is not positive");
  }
  cal.big_a = in.gm2 > 0.0 ? 9.0 * std::fabs((u1 + 2.0 * u2) * (2.0 * u1 + u2)) *
                                 std::sqrt(in.gm2) / std::sqrt(d1d2)
                           : 0.0;
  return cal;
}

calibration3 calibrate_degenerate(const generic_calibration_inputs& in,
                                  const depressed_cubic& dc) {
  calibration3 cal;
  cal.degenerate = true;
  // Repeated-pair exponent: twice the double root of the depressed cubic,
  // -3q/p, taken from the invariants directly (the double root itself is
  // ill-conditioned in the root finder, the ratio is not).
  const double u = -3.0 * dc.q / dc.p;
  cal.u_deg = u;
  cal.big_a = 1.5 * std::fabs(u);
  const double den1 = 6.0 * in.a0 - 2.0 * in.i1 - 3.0 * u;
  const double den2 = 6.0 * in.f0 - 2.0 * in.i1 - 3.0 * u;
  const double scale = std::max({1.0, std::fabs(in.i1), std::fabs(u)});
  if (std::fabs(den1) <= 1e-13 * scale || std::fabs(den2) <= 1e-13 * scale) {
    throw calibration_error("degenerate-branch coefficient pole: boundary entry decouples");
  }
  cal.p1_deg = clamp_nonneg(-2.0 * (3.0 * in.a0 - in.i1 + 3.0 * u) / den1, "coefficient p1");
  cal.p2_deg = clamp_nonneg(-2.0 * (3.0 * in.f0 - in.i1 + 3.0 * u) / den2, "coefficient p2");
  // Diagnostics: the repeated pair sits at -u/2 of the extremes.
  cal.u1 = u > 0.0 ? u : -0.5 * u;
  cal.u2 = u > 0.0 ? -0.5 * u : u;
  return cal;
}

// Radicand profiles rho_k^2 built slot-by-slot from the calibration.  The
// algebraic route tilde(eta)*eta_other - 4A^2 eta cancels exactly on three
// slots and would leave roundoff residue there; the closed coefficients
// (squared magnitudes on doubled slots, bracket products on cross slots)
// avoid that.
struct radicand_pair {
  exp_sum rho1_sq;
  exp_sum rho2_sq;
};

radicand_pair make_radicand_sums(const calibration3& cal) {
  radicand_pair out;
  if (cal.degenerate) {
    const double u = cal.u_deg;
    const double c = std::max(9.0 * u * u * (cal.p1_deg * cal.p2_deg - 1.0), 0.0);
    out.rho1_sq = exp_sum::single(c, -2.0 * u);
    out.rho2_sq = exp_sum::single(c, 2.0 * u);
    return out;
  }
  const double u1 = cal.u1, u2 = cal.u2, a = cal.big_a;
  const double du = u1 - u2;
  const double s1 = u1 + 2.0 * u2, s2 = 2.0 * u1 + u2;
  const double x1 = s1 * s1 + cal.p11 * cal.p21 * du * du - 4.0 * a * a;
  const double x2 = s2 * s2 + cal.p12 * cal.p22 * du * du - 4.0 * a * a;
  const double y = cal.p11 * cal.p21 * s2 * s2 + cal.p12 * cal.p22 * s1 * s1 - 4.0 * a * a;
  out.rho1_sq = exp_sum({{s1 * s1 * cal.p12 * cal.p21, -2.0 * u1},
                         {s2 * s2 * cal.p11 * cal.p22, -2.0 * u2},
                         {du * du * cal.p11 * cal.p12, 2.0 * (u1 + u2)},
                         {y, -(u1 + u2)},
                         {cal.p12 * x1, u2},
                         {cal.p11 * x2, u1}});
  out.rho2_sq = exp_sum({{s1 * s1 * cal.p11 * cal.p22, 2.0 * u1},
                         {s2 * s2 * cal.p12 * cal.p21, 2.0 * u2},
                         {du * du * cal.p21 * cal.p22, -2.0 * (u1 + u2)},
                         {y, u1 + u2},
                         {cal.p22 * x1, -u2},
                         {cal.p21 * x2, -u1}});
  return out;
}

// Ratio of two exponential sums integrated over [lo, hi], with the dominant
// exponent of the denominator factored out of both for range safety.  The
// caller multiplies the result by a phase gain, so the absolute tolerance is
// specified on the product.
double integrate_ratio(const exp_sum& num, const exp_sum& den, double lo, double hi,
                       double gain) {
  if (lo == hi) return 0.0;
  const auto& dt = den.terms();
  double shift = hi > 0.0 ? dt.front().exponent : dt.back().exponent;
  std::vector<exp_term> nt, dts;
  for (const auto& t : num.terms()) nt.push_back({t.coef, t.exponent - shift});
  for (const auto& t : dt) dts.push_back({t.coef, t.exponent - shift});
  exp_sum num_s(std::move(nt)), den_s(std::move(dts));
  auto f = [&](double t) { return num_s.eval(t) / den_s.eval(t); };
  return adaptive_simpson(f, lo, hi, 1e-10 / std::max(1.0, std::fabs(gain)));
}

}  // namespace

rho_profiles make_rho_profiles(const calibration3& cal, double b0, double c0, double g0) {
  rho_profiles out;
  if (cal.degenerate) {
    const double u = cal.u_deg;
    const double q1 = 2.0 * b0 * (cal.p1_deg + 1.0) * std::sqrt(cal.p2_deg + 1.0);
    const double q2 = 2.0 * c0 * (cal.p2_deg + 1.0) * std::sqrt(cal.p1_deg + 1.0);
    out.q1 = {q1, 0.0, 0.0};
    out.q2 = {q2, 0.0, 0.0};
    if (q1 != 0.0) out.rho1 = exp_sum::single(q1, -u);
    if (q2 != 0.0) out.rho2 = exp_sum::single(q2, u);
    return out;
  }

  const double u1 = cal.u1, u2 = cal.u2, a = cal.big_a;
  const double du = u1 - u2;
  const double x1 = (u1 + 2.0 * u2) * (u1 + 2.0 * u2) + cal.p11 * cal.p21 * du * du - 4.0 * a * a;
  const double x2 = (2.0 * u1 + u2) * (2.0 * u1 + u2) + cal.p12 * cal.p22 * du * du - 4.0 * a * a;
  const double m11 = std::fabs(u1 + 2.0 * u2) * std::sqrt(cal.p12 * cal.p21);
  const double m12 = std::fabs(2.0 * u1 + u2) * std::sqrt(cal.p11 * cal.p22);
  const double m13 = du * std::sqrt(cal.p11 * cal.p12);
  const double m21 = std::fabs(u1 + 2.0 * u2) * std::sqrt(cal.p11 * cal.p22);
  const double m22 = std::fabs(2.0 * u1 + u2) * std::sqrt(cal.p12 * cal.p21);
  const double m23 = du * std::sqrt(cal.p21 * cal.p22);

  std::array<double, 3> q1{}, q2{};
  int o1 = 1, o2 = 1;
  if (b0 != 0.0) {
    const int s11 = g0 != 0.0 ? sign_nonzero(x1) : 1;
    const int s12 = g0 != 0.0 ? sign_nonzero(x2) : 1;
    q1 = {s11 * m11, s12 * m12, m13};
    const double sum1 = q1[0] + q1[1] + q1[2];
    o1 = sign_of(b0) * sign_nonzero(sum1);
    if (g0 != 0.0) {
      const int s23 = sign_of(b0) * sign_of(g0) * sign_nonzero(sum1) *
                      sign_nonzero(cal.p21 * q1[1] - cal.p22 * q1[0]);
      q2 = {s23 * sign_nonzero(x1) * m21, s23 * sign_nonzero(x2) * m22, s23 * m23};
    } else {
      q2 = {m21, m22, m23};
    }
    const double sum2 = q2[0] + q2[1] + q2[2];
    if (c0 != 0.0) {
      o2 = sign_of(c0) * sign_nonzero(sum2);
    } else {
      // Entry starts at zero; its sign for s > 0 follows the initial slope
      // c'(0) = -2 b0 g0.
      const double slope = q2[0] * u1 + q2[1] * u2 - q2[2] * (u1 + u2);
      o2 = sign_nonzero(-2.0 * b0 * g0) * sign_nonzero(slope);
    }
  } else {
    q2 = {sign_nonzero(x1) * m21, sign_nonzero(x2) * m22, m23};
    const double sum2 = q2[0] + q2[1] + q2[2];
    if (c0 != 0.0) {
      o2 = sign_of(c0) * sign_nonzero(sum2);
    } else {
      const double slope = q2[0] * u1 + q2[1] * u2 - q2[2] * (u1 + u2);
      o2 = sign_nonzero(-2.0 * b0 * g0) * sign_nonzero(slope);
    }
    const int s13 = sign_of(c0) * sign_of(g0) * sign_nonzero(sum2) *
                    sign_nonzero(cal.p11 * q2[1] - cal.p12 * q2[0]);
    q1 = {s13 * sign_nonzero(x1) * m11, s13 * sign_nonzero(x2) * m12, s13 * m13};
    o1 = 1;
  }
  for (auto& v : q1) v *= o1;
  for (auto& v : q2) v *= o2;
  out.q1 = q1;
  out.q2 = q2;
  out.rho1 = exp_sum({{q1[0], -u1}, {q1[1], -u2}, {q1[2], u1 + u2}});
  out.rho2 = exp_sum({{q2[0], u1}, {q2[1], u2}, {q2[2], -(u1 + u2)}});
  return out;
}

exact3_solution calibrate3(const hermitian_matrix& h0, const calibrate3_options& opts) {
  if (h0.size() != 3) throw dimension_unsupported("calibrate3 requires a 3x3 matrix");
  const double tr = h0.trace();
  const double scale = std::max(1.0, h0.frobenius_norm());
  const double ztol = opts.zero_entry_tol * scale;

  const double bm = std::abs(h0.at(0, 1));
  const double gm = std::abs(h0.at(0, 2));
  const double cm = std::abs(h0.at(1, 2));
  const int live = (bm > ztol) + (gm > ztol) + (cm > ztol);

  exact3_solution sol;
  sol.h0 = h0;
  sol.trace = tr;

  if (live == 0) {
    sol.mode = solve3_mode::constant_diagonal;
    const double third = tr / 3.0;
    sol.eta1 = exp_sum::single(1.0, 2.0 * (h0.at(0, 0).real() - third));
    sol.eta2 = exp_sum::single(1.0, -2.0 * (h0.at(2, 2).real() - third));
    std::array<double, 3> w = {h0.at(0, 0).real(), h0.at(1, 1).real(), h0.at(2, 2).real()};
    std::sort(w.begin(), w.end(), std::greater<>());
    sol.cal.u1 = 2.0 * (w[0] - third);
    sol.cal.u2 = 2.0 * (w[2] - third);
    return sol;
  }

  const phase_frame fr = solve_phase_frame(h0, ztol, opts.align_tol);

  if (live == 1) {
    if (bm > ztol) return solve_decoupled_block(h0, fr, 0, 1);
    if (cm > ztol) return solve_decoupled_block(h0, fr, 1, 2);
    return solve_decoupled_block(h0, fr, 0, 2);
  }

  const invariants3 inv = principal_invariants(h0);
  const depressed_cubic dc = depress(inv);
  const auto roots = cubic_roots(dc);
  const double u1 = 2.0 * roots[0];
  const double u2 = 2.0 * roots[2];
  const double maxu = std::max(std::fabs(u1), std::fabs(u2));
  if (maxu <= 1e-12 * scale) {
    throw calibration_error("spectrum collapsed to a point with live couplings present");
  }
  if (u1 - u2 <= opts.degenerate_rel_tol * maxu) {
    throw top_pair_degenerate("extreme flow exponents coincide without full degeneracy");
  }

  generic_calibration_inputs in;
  in.a0 = h0.at(0, 0).real();
  in.f0 = h0.at(2, 2).real();
  in.i1 = inv.i1;
  in.bm2 = bm * bm;
  in.cm2 = cm * cm;
  in.gm2 = gm > ztol ? gm * gm : 0.0;

  const bool deg = std::fabs(u1 + 2.0 * u2) <= opts.degenerate_rel_tol * maxu ||
                   std::fabs(2.0 * u1 + u2) <= opts.degenerate_rel_tol * maxu;
  sol.cal = deg ? calibrate_degenerate(in, dc) : calibrate_generic(in, u1, u2);
  if (!deg) {
    sol.eta1 = exp_sum(
        {{sol.cal.p11, u1}, {sol.cal.p12, u2}, {1.0, -(u1 + u2)}});
    sol.eta2 = exp_sum(
        {{sol.cal.p21, -u1}, {sol.cal.p22, -u2}, {1.0, u1 + u2}});
  } else {
    const double u = sol.cal.u_deg;
    sol.eta1 = exp_sum({{sol.cal.p1_deg, u}, {1.0, -2.0 * u}});
    sol.eta2 = exp_sum({{sol.cal.p2_deg, -u}, {1.0, 2.0 * u}});
  }

  if (fr.aligned) {
    sol.mode = solve3_mode::signed_profiles;
    sol.theta = fr.theta;
    rho_profiles rp = make_rho_profiles(sol.cal, fr.b_real, fr.c_real, fr.g_real);
    sol.rho1 = rp.rho1;
    sol.rho2 = rp.rho2;
    sol.sign_g = sign_of(fr.g_real);
  } else {
    sol.mode = solve3_mode::radicand_profiles;
    radicand_pair rs = make_radicand_sums(sol.cal);
    sol.rho1_sq = rs.rho1_sq;
    sol.rho2_sq = rs.rho2_sq;
    phase_state ph;
    ph.phi_b0 = std::arg(h0.at(0, 1));
    ph.phi_c0 = std::arg(h0.at(1, 2));
    ph.phi_g0 = std::arg(h0.at(0, 2));
    ph.c_const = bm * cm / gm * std::sin(ph.phi_g0 - ph.phi_b0 - ph.phi_c0);
    sol.phase = ph;
    sol.sign_g = 1;
  }
  return sol;
}

phase_triple phase_at(const exact3_solution& sol, double s) {
  phase_triple ph;
  if (sol.mode != solve3_mode::radicand_profiles || !sol.phase || sol.phase->c_const == 0.0) {
    ph.phi_b = std::arg(sol.h0.at(0, 1));
    ph.phi_c = std::arg(sol.h0.at(1, 2));
    ph.phi_g = std::arg(sol.h0.at(0, 2));
    return ph;
  }
  const phase_state& st = *sol.phase;
  const double a2 = sol.cal.big_a * sol.cal.big_a;
  const double k = 8.0 * st.c_const * a2;
  ph.phi_b = st.phi_b0 + k * integrate_ratio(sol.eta1, sol.rho1_sq, 0.0, s, k);
  ph.phi_c = st.phi_c0 - k * integrate_ratio(sol.eta2, sol.rho2_sq, 0.0, s, k);
  ph.phi_g = st.phi_g0;
  return ph;
}

std::vector<phase_triple> phase_series(const exact3_solution& sol,
                                       const std::vector<double>& s_points) {
  std::vector<phase_triple> out(s_points.size());
  for (std::size_t i = 1; i < s_points.size(); ++i) {
    if (!(s_points[i] >= s_points[i - 1]))
      throw flow_error("phase_series needs ascending flow times");
  }
  if (sol.mode != solve3_mode::radicand_profiles || !sol.phase || sol.phase->c_const == 0.0) {
    for (std::size_t i = 0; i < s_points.size(); ++i) out[i] = phase_at(sol, s_points[i]);
    return out;
  }
  const phase_state& st = *sol.phase;
  const double k = 8.0 * st.c_const * sol.cal.big_a * sol.cal.big_a;
  double ib = 0.0, ic = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < s_points.size(); ++i) {
    ib += integrate_ratio(sol.eta1, sol.rho1_sq, prev, s_points[i], k);
    ic += integrate_ratio(sol.eta2, sol.rho2_sq, prev, s_points[i], k);
    prev = s_points[i];
    out[i].phi_b = st.phi_b0 + k * ib;
    out[i].phi_c = st.phi_c0 - k * ic;
    out[i].phi_g = st.phi_g0;
  }
  return out;
}

namespace {

// Log of the radicand, -inf when it is clamped to zero.  The radicand is a
// squared magnitude, so any negative value must sit at roundoff level
// relative to the largest term of the sum.
double log_radicand(const exp_sum& rho_sq, double s) {
  const exp_sum::signed_log v = rho_sq.signed_log_eval(s);
  if (v.sign > 0) return v.log_abs;
  if (v.sign < 0 && v.log_abs > std::log(1e-9) + v.log_scale) {
    char msg[128];
    std::snprintf(msg, sizeof msg,
                  "off-diagonal radicand negative beyond roundoff at s=%.6g", s);
    throw negative_radicand(msg);
  }
  return -std::numeric_limits<double>::infinity();
}

}  // namespace

hermitian_matrix eval3(const exact3_solution& sol, double s) {
  if (sol.mode == solve3_mode::constant_diagonal) return sol.h0;

  // All entries are ratios against eta values, evaluated in log space so the
  // solution stays usable far past the overflow point of a direct eval.
  const double third = sol.trace / 3.0;
  const double le1 = sol.eta1.log_eval(s), le2 = sol.eta2.log_eval(s);
  const double l1 = sol.eta1.log_derivative_at(s);
  const double l2 = sol.eta2.log_derivative_at(s);
  const double a = third + 0.5 * l1;
  const double d = third - 0.5 * l1 + 0.5 * l2;
  const double f = third - 0.5 * l2;
  const double log2 = std::log(2.0);

  complexd eb, ec, eg;
  if (sol.mode == solve3_mode::signed_profiles) {
    double b = 0.0, c = 0.0, g = 0.0;
    if (!sol.rho1.is_zero()) {
      const exp_sum::signed_log v = sol.rho1.signed_log_eval(s);
      if (v.sign != 0) b = v.sign * std::exp(v.log_abs - log2 - le1 - 0.5 * le2);
    }
    if (!sol.rho2.is_zero()) {
      const exp_sum::signed_log v = sol.rho2.signed_log_eval(s);
      if (v.sign != 0) c = v.sign * std::exp(v.log_abs - log2 - le2 - 0.5 * le1);
    }
    if (sol.sign_g != 0)
      g = sol.sign_g * std::exp(std::log(sol.cal.big_a) - 0.5 * (le1 + le2));
    const auto& th = sol.theta;
    eb = b * std::exp(complexd(0.0, th[0] - th[1]));
    ec = c * std::exp(complexd(0.0, th[1] - th[2]));
    eg = g * std::exp(complexd(0.0, th[0] - th[2]));
  } else {
    const double lr1 = log_radicand(sol.rho1_sq, s);
    const double lr2 = log_radicand(sol.rho2_sq, s);
    const double b = std::exp(0.5 * lr1 - log2 - le1 - 0.5 * le2);
    const double c = std::exp(0.5 * lr2 - log2 - le2 - 0.5 * le1);
    const double g = std::exp(std::log(sol.cal.big_a) - 0.5 * (le1 + le2));
    const phase_triple ph = phase_at(sol, s);
    eb = b * std::exp(complexd(0.0, ph.phi_b));
    ec = c * std::exp(complexd(0.0, ph.phi_c));
    eg = g * std::exp(complexd(0.0, ph.phi_g));
  }

  complex_matrix m(3);
  m(0, 0) = a;
  m(1, 1) = d;
  m(2, 2) = f;
  m(0, 1) = eb;
  m(1, 0) = std::conj(eb);
  m(1, 2) = ec;
  m(2, 1) = std::conj(ec);
  m(0, 2) = eg;
  m(2, 0) = std::conj(eg);
  return hermitian_matrix::validate(m);
}

exact2_solution exact2x2(const hermitian_matrix& h0) {
  if (h0.size() != 2) throw dimension_unsupported("exact2x2 requires a 2x2 matrix");
  exact2_solution sol;
  sol.h0 = h0;
  sol.trace = h0.trace();
  const double gm = std::abs(h0.at(0, 1));
  const double scale = std::max(1.0, h0.frobenius_norm());
  if (gm <= 1e-13 * scale) {
    sol.constant = true;
    return sol;
  }
  const double gap = h0.at(0, 0).real() - h0.at(1, 1).real();
  sol.u = std::sqrt(gap * gap + 4.0 * gm * gm);
  sol.p = (2.0 * gm * gm + gap * gap + gap * sol.u) / (2.0 * gm * gm);
  sol.big_a = sol.u * std::sqrt(sol.p);
  sol.eta = exp_sum({{sol.p, sol.u}, {1.0, -sol.u}});
  sol.sign_g = 1;
  sol.phi = std::arg(h0.at(0, 1));
  return sol;
}

hermitian_matrix eval2(const exact2_solution& sol, double s) {
  if (sol.constant) return sol.h0;
  const double le = sol.eta.log_eval(s);
  const double l = sol.eta.log_derivative_at(s);
  const double half = sol.trace / 2.0;
  const complexd off = std::exp(std::log(sol.big_a) - le) * std::exp(complexd(0.0, sol.phi));
  complex_matrix m(2);
  m(0, 0) = half + 0.5 * l;
  m(1, 1) = half - 0.5 * l;
  m(0, 1) = off;
  m(1, 0) = std::conj(off);
  return hermitian_matrix::validate(m);
}

}  // namespace wegner
