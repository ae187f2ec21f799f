#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "wegner/closed3.hpp"
#include "wegner/flow_numeric.hpp"
#include "wegner/spectra.hpp"

using namespace wegner;

namespace {

const complexd I(0.0, 1.0);

hermitian_matrix herm3(double a, double d, double f, complexd b, complexd g, complexd c) {
  std::vector<std::vector<complexd>> grid{
      {a, b, g}, {std::conj(b), d, c}, {std::conj(g), std::conj(c), f}};
  return hermitian_matrix::validate(grid);
}

hermitian_matrix sym3(double a, double d, double f, double b, double g, double c) {
  return herm3(a, d, f, b, g, c);
}

// The 3x3 matrix whose flow profiles have integer content: eigenvalues
// 29/6, 17/6, 7/3, flow exponents 3, -1, -2.
hermitian_matrix worked_symmetric() {
  return sym3(17.0 / 6, 547.0 / 174, 350.0 / 87, std::sqrt(5.0 / 87),
              3 * std::sqrt(5.0 / 58), (26.0 / 29) * std::sqrt(2.0 / 3));
}

// Same moduli with phases pi/3, -pi/2, -pi/6 on b, g, c.
hermitian_matrix worked_hermitian() {
  return herm3(17.0 / 6, 547.0 / 174, 350.0 / 87,
               std::sqrt(5.0 / 87) * std::exp(I * (M_PI / 3)),
               3 * std::sqrt(5.0 / 58) * std::exp(-I * (M_PI / 2)),
               (26.0 / 29) * std::sqrt(2.0 / 3) * std::exp(-I * (M_PI / 6)));
}

double max_entry_diff(const hermitian_matrix& x, const hermitian_matrix& y) {
  double d = 0.0;
  for (int i = 0; i < x.size(); ++i)
    for (int j = 0; j < x.size(); ++j) d = std::max(d, std::abs(x.at(i, j) - y.at(i, j)));
  return d;
}

// Max entrywise deviation between the closed form and RK4 over [0, s_max].
double closed_vs_rk4(const hermitian_matrix& h0, double s_max, int steps, int n_samples) {
  exact3_solution sol = calibrate3(h0);
  flow_trajectory traj = integrate(h0, make_uniform_plan(s_max, steps, n_samples));
  double dev = 0.0;
  for (const auto& sample : traj.samples)
    dev = std::max(dev, max_entry_diff(eval3(sol, sample.s), sample.state));
  return dev;
}

double coefficient_at(const exp_sum& f, double exponent, double match_tol = 1e-6) {
  for (const auto& t : f.terms())
    if (std::fabs(t.exponent - exponent) <= match_tol) return t.coef;
  REQUIRE_MESSAGE(false, "no term with exponent ", exponent);
  return 0.0;
}

}  // namespace

TEST_CASE("closed3: calibration constants of the worked symmetric example") {
  exact3_solution sol = calibrate3(worked_symmetric());
  CHECK(sol.mode == solve3_mode::signed_profiles);
  CHECK(sol.cal.u1 == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sol.cal.u2 == doctest::Approx(-2.0).epsilon(1e-12));
  // Canonical normalization carries coefficient 1 on the e^{-(u1+u2)s} term
  // of eta1 (resp. e^{(u1+u2)s} of eta2).
  CHECK(sol.cal.p11 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(sol.cal.p12 == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(sol.cal.p21 == doctest::Approx(289.0 / 25).epsilon(1e-10));
  CHECK(sol.cal.p22 == doctest::Approx(121.0 / 25).epsilon(1e-10));
  CHECK(sol.cal.big_a == doctest::Approx(9.0).epsilon(1e-10));
  CHECK_FALSE(sol.cal.degenerate);
  CHECK(coefficient_at(sol.eta1, 3.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(coefficient_at(sol.eta1, -1.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(coefficient_at(sol.eta1, -2.0) == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(coefficient_at(sol.eta2, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("closed3: signed off-diagonal profiles of the worked symmetric example") {
  exact3_solution sol = calibrate3(worked_symmetric());
  const hermitian_matrix h0 = worked_symmetric();
  rho_profiles rho = make_rho_profiles(sol.cal, h0.at(0, 1).real(), h0.at(1, 2).real(),
                                       h0.at(0, 2).real());
  // Slot order (-u1, -u2, u1+u2) for rho1; (u1, u2, -(u1+u2)) for rho2.
  CHECK(rho.q1[0] == doctest::Approx(-34.0 / 5).epsilon(1e-10));
  CHECK(rho.q1[1] == doctest::Approx(44.0 / 5).epsilon(1e-10));
  CHECK(rho.q1[2] == doctest::Approx(10.0).epsilon(1e-10));
  CHECK(rho.q2[0] == doctest::Approx(-11.0 / 5).epsilon(1e-10));
  CHECK(rho.q2[1] == doctest::Approx(136.0 / 5).epsilon(1e-10));
  CHECK(rho.q2[2] == doctest::Approx(187.0 / 5).epsilon(1e-10));
  // rho1(0) = 2 b0 eta1(0) sqrt(eta2(0)) ties the profile back to the entry.
  const double b0 = h0.at(0, 1).real();
  CHECK(rho.rho1.value_at_zero() ==
        doctest::Approx(2 * b0 * 6.0 * std::sqrt(87.0 / 5)).epsilon(1e-10));
}

TEST_CASE("closed3: worked symmetric example reproduces itself at s = 0 and "
          "matches the integrator") {
  const hermitian_matrix h0 = worked_symmetric();
  exact3_solution sol = calibrate3(h0);
  CHECK(max_entry_diff(eval3(sol, 0.0), h0) <= 1e-12);
  CHECK(closed_vs_rk4(h0, 5.0, 5000, 60) <= 1e-9);
}

TEST_CASE("closed3: worked Hermitian example calibration") {
  exact3_solution sol = calibrate3(worked_hermitian());
  CHECK(sol.mode == solve3_mode::radicand_profiles);
  // Closed-form exponents from the trig root formula.
  const double alpha1 = std::acos(2889.0 / 5887 * std::sqrt(3.0 / 7));
  const double u1 = 2 * std::sqrt(7.0 / 3) * std::cos(alpha1 / 3);
  const double u2 = -2 * std::sqrt(7.0 / 3) * std::sin(M_PI / 6 + alpha1 / 3);
  CHECK(sol.cal.u1 == doctest::Approx(u1).epsilon(1e-12));
  CHECK(sol.cal.u2 == doctest::Approx(u2).epsilon(1e-12));
  REQUIRE(sol.phase.has_value());
  // Coupling constant |b0 c0 / g0| sin(phi_g - phi_b - phi_c) = (52/261) sin(-2pi/3).
  CHECK(sol.phase->c_const ==
        doctest::Approx(-26.0 * std::sqrt(3.0) / 261).epsilon(1e-9));
  CHECK(sol.phase->phi_b0 == doctest::Approx(M_PI / 3).epsilon(1e-12));
  CHECK(sol.phase->phi_c0 == doctest::Approx(-M_PI / 6).epsilon(1e-12));
  CHECK(sol.phase->phi_g0 == doctest::Approx(-M_PI / 2).epsilon(1e-12));
}

TEST_CASE("closed3: worked Hermitian profiles match their published decimals") {
  exact3_solution sol = calibrate3(worked_hermitian());
  // Rescale each profile to the normalization eta1(0) = eta2(0) = sqrt(58/5)/3
  // in which the reference coefficients are quoted (4 significant digits).
  const double target = std::sqrt(58.0 / 5) / 3;
  const double l1 = target / sol.eta1.value_at_zero();
  const double l2 = target / sol.eta2.value_at_zero();
  CHECK(l1 * coefficient_at(sol.eta1, 2.796, 1e-3) ==
        doctest::Approx(0.1625).epsilon(5e-4));
  CHECK(l1 * coefficient_at(sol.eta1, -0.3324, 1e-3) ==
        doctest::Approx(0.3786).epsilon(5e-4));
  CHECK(l1 * coefficient_at(sol.eta1, -2.464, 1e-3) ==
        doctest::Approx(0.5942).epsilon(5e-4));
  CHECK(l2 * coefficient_at(sol.eta2, -2.796, 1e-3) ==
        doctest::Approx(0.8158).epsilon(5e-4));
  CHECK(l2 * coefficient_at(sol.eta2, 0.3324, 1e-3) ==
        doctest::Approx(0.03381).epsilon(5e-4));
  CHECK(l2 * coefficient_at(sol.eta2, 2.464, 1e-3) ==
        doctest::Approx(0.2857).epsilon(5e-4));
}

TEST_CASE("closed3: worked Hermitian example matches the integrator, phases included") {
  const hermitian_matrix h0 = worked_hermitian();
  CHECK(max_entry_diff(eval3(calibrate3(h0), 0.0), h0) <= 1e-11);
  CHECK(closed_vs_rk4(h0, 5.0, 5000, 60) <= 1e-7);
}

TEST_CASE("closed3: corner phase is frozen, moving phases track the integrator") {
  const hermitian_matrix h0 = worked_hermitian();
  exact3_solution sol = calibrate3(h0);
  flow_trajectory traj = integrate(h0, make_uniform_plan(4.0, 4000, 30));
  std::vector<double> times;
  for (const auto& sample : traj.samples) times.push_back(sample.s);
  std::vector<phase_triple> phases = phase_series(sol, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK(phases[i].phi_g == doctest::Approx(-M_PI / 2).epsilon(1e-12));
    const complexd b = traj.samples[i].state.at(0, 1);
    const complexd c = traj.samples[i].state.at(1, 2);
    // Compare angles through exp(i phi) to dodge branch cuts.
    CHECK(std::abs(std::exp(I * phases[i].phi_b) - b / std::abs(b)) <= 1e-6);
    CHECK(std::abs(std::exp(I * phases[i].phi_c) - c / std::abs(c)) <= 1e-6);
  }
}

TEST_CASE("closed3: phase_series agrees with pointwise phase_at") {
  exact3_solution sol = calibrate3(worked_hermitian());
  std::vector<double> times{0.0, 0.3, 0.9, 1.7, 3.0, 5.0};
  std::vector<phase_triple> series = phase_series(sol, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    phase_triple single = phase_at(sol, times[i]);
    CHECK(series[i].phi_b == doctest::Approx(single.phi_b).epsilon(1e-9));
    CHECK(series[i].phi_c == doctest::Approx(single.phi_c).epsilon(1e-9));
    CHECK(series[i].phi_g == single.phi_g);
  }
}

TEST_CASE("closed3: the coupling constant is conserved along the numeric flow") {
  const hermitian_matrix h0 = worked_hermitian();
  exact3_solution sol = calibrate3(h0);
  flow_trajectory traj = integrate(h0, make_uniform_plan(4.0, 8000, 40));
  for (const auto& sample : traj.samples) {
    const complexd b = sample.state.at(0, 1);
    const complexd c = sample.state.at(1, 2);
    const complexd g = sample.state.at(0, 2);
    const double measured = -std::imag(b * c * std::conj(g)) / std::norm(g);
    CHECK(measured == doctest::Approx(sol.phase->c_const).epsilon(1e-7));
  }
}

TEST_CASE("closed3: random symmetric matrices round-trip and match the integrator") {
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> dist(-1.5, 1.5);
  int tested = 0;
  while (tested < 12) {
    hermitian_matrix h0 =
        sym3(dist(rng) + 2.0, dist(rng), dist(rng) - 2.0, dist(rng), dist(rng), dist(rng));
    const auto w = eigh(h0).eigenvalues;
    if (w[0] - w[1] < 0.3 || w[1] - w[2] < 0.3) continue;  // keep rates tame
    ++tested;
    exact3_solution sol = calibrate3(h0);
    CHECK(max_entry_diff(eval3(sol, 0.0), h0) <= 1e-9);
    CHECK(closed_vs_rk4(h0, 3.0, 3000, 20) <= 1e-8);
  }
}

TEST_CASE("closed3: random Hermitian matrices round-trip and match the integrator") {
  std::mt19937 rng(103);
  std::uniform_real_distribution<double> dist(-1.5, 1.5);
  int tested = 0;
  while (tested < 12) {
    hermitian_matrix h0 = herm3(dist(rng) + 2.0, dist(rng), dist(rng) - 2.0,
                                complexd(dist(rng), dist(rng)), complexd(dist(rng), dist(rng)),
                                complexd(dist(rng), dist(rng)));
    const auto w = eigh(h0).eigenvalues;
    if (w[0] - w[1] < 0.3 || w[1] - w[2] < 0.3) continue;
    ++tested;
    exact3_solution sol = calibrate3(h0);
    CHECK(max_entry_diff(eval3(sol, 0.0), h0) <= 1e-9);
    CHECK(closed_vs_rk4(h0, 3.0, 3000, 20) <= 1e-7);
  }
}

TEST_CASE("closed3: constant-phase-frame Hermitian input takes the signed route") {
  // Conjugating a real symmetric flow by constant diagonal phases leaves the
  // coupling constant at zero; the moduli evolve exactly as in the real case.
  const hermitian_matrix base = worked_symmetric();
  const double t0 = 0.4, t1 = -1.1, t2 = 2.3;
  hermitian_matrix h0 = herm3(base.at(0, 0).real(), base.at(1, 1).real(), base.at(2, 2).real(),
                              base.at(0, 1) * std::exp(I * (t0 - t1)),
                              base.at(0, 2) * std::exp(I * (t0 - t2)),
                              base.at(1, 2) * std::exp(I * (t1 - t2)));
  exact3_solution sol = calibrate3(h0);
  CHECK(sol.mode == solve3_mode::signed_profiles);
  CHECK(max_entry_diff(eval3(sol, 0.0), h0) <= 1e-11);
  CHECK(closed_vs_rk4(h0, 4.0, 4000, 30) <= 1e-9);
  // Phases stay put even though the entries are complex.
  phase_triple ph = phase_at(sol, 2.0);
  CHECK(std::abs(std::exp(I * ph.phi_b) - std::exp(I * (t0 - t1))) <= 1e-10);
}

TEST_CASE("closed3: decoupled blocks evolve exactly") {
  std::mt19937 rng(107);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  // One live off-diagonal at a time: (0,1) only, (1,2) only, (0,2) only.
  for (int live = 0; live < 3; ++live) {
    double b = live == 0 ? 0.8 : 0.0;
    double c = live == 1 ? 0.8 : 0.0;
    double g = live == 2 ? 0.8 : 0.0;
    hermitian_matrix h0 = sym3(1.5 + dist(rng), dist(rng), -1.5 + dist(rng), b, g, c);
    exact3_solution sol = calibrate3(h0);
    CHECK(max_entry_diff(eval3(sol, 0.0), h0) <= 1e-11);
    CHECK(closed_vs_rk4(h0, 4.0, 4000, 30) <= 1e-9);
  }
}

TEST_CASE("closed3: diagonal input is a fixed point") {
  hermitian_matrix h0 = sym3(2.0, 1.0, -1.0, 0.0, 0.0, 0.0);
  exact3_solution sol = calibrate3(h0);
  CHECK(sol.mode == solve3_mode::constant_diagonal);
  CHECK(max_entry_diff(eval3(sol, 7.5), h0) == 0.0);
}

TEST_CASE("closed3: degenerate pair below the top eigenvalue") {
  // mu I + (lambda - mu) v v^T with unit v, all components nonzero:
  // spectrum {2, 1/2, 1/2}, exponents (2, -1, -1), lower slot pair closes
  // (u1 + 2 u2 = 0).
  const double v0 = 0.6, v1 = 0.64, v2 = 0.48;  // exact unit vector
  complex_matrix m(3);
  const double w[3] = {v0, v1, v2};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = (i == j ? 0.5 : 0.0) + 1.5 * w[i] * w[j];
  hermitian_matrix h0 = hermitian_matrix::validate(m);
  exact3_solution sol = calibrate3(h0);
  CHECK(sol.cal.degenerate);
  CHECK(sol.cal.u_deg == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(max_entry_diff(eval3(sol, 0.0), h0) <= 1e-9);
  CHECK(closed_vs_rk4(h0, 4.0, 4000, 30) <= 1e-8);
}

TEST_CASE("closed3: degenerate pair above the bottom eigenvalue") {
  // Spectrum {1/2, 1/2, -1}: exponents (1, 1, -2), top slot pair closes
  // (2 u1 + u2 = 0).  Complex projector direction exercises the Hermitian
  // branch.
  const complexd w[3] = {0.6, 0.64 * std::exp(I * 0.3), 0.48 * std::exp(-I * 0.7)};
  complex_matrix m(3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = (i == j ? 0.5 : 0.0) - 1.5 * w[i] * std::conj(w[j]);
  hermitian_matrix h0 = hermitian_matrix::validate(m);
  exact3_solution sol = calibrate3(h0);
  CHECK(sol.cal.degenerate);
  CHECK(sol.cal.u_deg == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(max_entry_diff(eval3(sol, 0.0), h0) <= 1e-9);
  CHECK(closed_vs_rk4(h0, 4.0, 4000, 30) <= 1e-7);
}

TEST_CASE("closed3: late-time state is the sorted diagonal") {
  const hermitian_matrix h0 = worked_symmetric();
  exact3_solution sol = calibrate3(h0);
  hermitian_matrix late = eval3(sol, 50.0);
  CHECK(late.at(0, 0).real() == doctest::Approx(29.0 / 6).epsilon(1e-10));
  CHECK(late.at(1, 1).real() == doctest::Approx(17.0 / 6).epsilon(1e-10));
  CHECK(late.at(2, 2).real() == doctest::Approx(7.0 / 3).epsilon(1e-10));
  CHECK(std::abs(late.at(0, 1)) <= 1e-10);
  CHECK(std::abs(late.at(1, 2)) <= 1e-10);
  // Far past the overflow horizon of naive exponentials.
  hermitian_matrix far = eval3(sol, 1000.0);
  CHECK(far.at(0, 0).real() == doctest::Approx(29.0 / 6).epsilon(1e-10));
}

TEST_CASE("closed3: dimension guard") {
  CHECK_THROWS_AS(calibrate3(hermitian_matrix::validate(complex_matrix(2))),
                  dimension_unsupported);
}

TEST_CASE("closed2: worked 2x2 numbers") {
  // [[1, sqrt(2)], [sqrt(2), 0]]: u = 3, p = 2, A = 3 sqrt(2)... in the
  // convention u = sqrt((a0-f0)^2 + 4 g0^2), p from the initial gap.
  std::vector<std::vector<complexd>> g{{1.0, std::sqrt(2.0)}, {std::sqrt(2.0), 0.0}};
  hermitian_matrix h0 = hermitian_matrix::validate(g);
  exact2_solution sol = exact2x2(h0);
  CHECK(sol.u == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sol.p == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sol.big_a == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-12));
  hermitian_matrix back = eval2(sol, 0.0);
  CHECK(std::abs(back.at(0, 1) - h0.at(0, 1)) <= 1e-12);
  CHECK(back.at(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
  // Eigenvalues 2 and -1 appear on the late diagonal.
  hermitian_matrix late = eval2(sol, 40.0);
  CHECK(late.at(0, 0).real() == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(late.at(1, 1).real() == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("closed2: complex off-diagonal keeps its phase and matches the integrator") {
  complex_matrix m(2);
  m(0, 0) = 0.7;
  m(1, 1) = -0.9;
  m(0, 1) = complexd(0.4, -0.6);
  m(1, 0) = std::conj(m(0, 1));
  hermitian_matrix h0 = hermitian_matrix::validate(m);
  exact2_solution sol = exact2x2(h0);
  flow_trajectory traj = integrate(h0, make_uniform_plan(3.0, 3000, 20));
  for (const auto& sample : traj.samples) {
    hermitian_matrix ex = eval2(sol, sample.s);
    CHECK(max_entry_diff(ex, sample.state) <= 1e-9);
  }
  const complexd dir0 = h0.at(0, 1) / std::abs(h0.at(0, 1));
  const complexd dir1 = eval2(sol, 2.0).at(0, 1) / std::abs(eval2(sol, 2.0).at(0, 1));
  CHECK(std::abs(dir0 - dir1) <= 1e-12);
}

TEST_CASE("closed2: diagonal input is constant") {
  std::vector<std::vector<complexd>> g{{3.0, 0.0}, {0.0, 1.0}};
  hermitian_matrix h0 = hermitian_matrix::validate(g);
  exact2_solution sol = exact2x2(h0);
  CHECK(sol.constant);
  CHECK(eval2(sol, 9.0).at(0, 0).real() == 3.0);
}
