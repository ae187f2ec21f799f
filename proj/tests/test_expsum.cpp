#include <cmath>
#include <vector>

#include "doctest.h"
#include "wegner/expsum.hpp"

using wegner::exp_sum;
using wegner::exp_term;

namespace {

// Plain uncompensated reference evaluation, independent of the class.
double naive_eval(const std::vector<exp_term>& terms, double s) {
  double acc = 0.0;
  for (const auto& t : terms) acc += t.coef * std::exp(t.exponent * s);
  return acc;
}

}  // namespace

TEST_CASE("expsum: canonical form sorts descending and merges close exponents") {
  exp_sum f({{1.0, -2.0}, {3.0, 5.0}, {2.0, 1.0}});
  REQUIRE(f.size() == 3);
  CHECK(f.terms()[0].exponent == 5.0);
  CHECK(f.terms()[1].exponent == 1.0);
  CHECK(f.terms()[2].exponent == -2.0);

  // Exponents 1e-12 apart lie under merge_tol: one term, coefficients added,
  // exponent at the coefficient-weighted average.
  exp_sum g({{1.0, 2.0}, {3.0, 2.0 + 1e-12}});
  REQUIRE(g.size() == 1);
  CHECK(g.terms()[0].coef == doctest::Approx(4.0));
  CHECK(g.terms()[0].exponent ==
        doctest::Approx(2.0 + 0.75e-12).epsilon(3e-14));

  // Coefficients cancelling to below drop_tol vanish entirely.
  exp_sum h({{1.0, 3.0}, {-1.0, 3.0}});
  CHECK(h.is_zero());
}

TEST_CASE("expsum: constant and single builders") {
  CHECK(exp_sum::constant(4.5).eval(2.0) == doctest::Approx(4.5));
  CHECK(exp_sum::constant(0.0).is_zero());
  exp_sum f = exp_sum::single(2.0, -1.0);
  CHECK(f.eval(1.0) == doctest::Approx(2.0 * std::exp(-1.0)));
  CHECK(f.value_at_zero() == doctest::Approx(2.0));
}

TEST_CASE("expsum: eval matches the plain sum and respects the overflow guard") {
  std::vector<exp_term> terms{{0.25, 3.0}, {-1.5, 1.0}, {2.0, -2.0}, {0.5, 0.0}};
  exp_sum f(terms);
  for (double s : {-3.0, -1.0, 0.0, 0.5, 2.0, 10.0})
    CHECK(f.eval(s) == doctest::Approx(naive_eval(terms, s)).epsilon(1e-14));
  CHECK(f.value_at_zero() == doctest::Approx(naive_eval(terms, 0.0)));
  CHECK_THROWS_AS(f.eval(300.0), wegner::overflow_error);   // 3 * 300 > 700
  CHECK_THROWS_AS(f.eval(-400.0), wegner::overflow_error);  // -2 * -400 > 700
}

TEST_CASE("expsum: derivative agrees with central differences") {
  exp_sum f({{1.0, 2.0}, {3.0, -1.0}, {0.5, 0.0}});
  exp_sum df = f.derivative();
  CHECK(df.size() == 2);  // the constant term vanishes
  const double h = 1e-6;
  for (double s : {-1.0, 0.0, 0.7}) {
    const double fd = (f.eval(s + h) - f.eval(s - h)) / (2 * h);
    CHECK(df.eval(s) == doctest::Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("expsum: product evaluates pointwise and satisfies Leibniz") {
  exp_sum f({{1.0, 2.0}, {-0.5, -1.0}});
  exp_sum g({{2.0, 1.5}, {1.0, 0.0}, {0.25, -2.5}});
  exp_sum fg = f * g;
  exp_sum leibniz = f.derivative() * g + f * g.derivative();
  exp_sum dfg = fg.derivative();
  for (double s : {-2.0, 0.0, 1.3}) {
    CHECK(fg.eval(s) == doctest::Approx(f.eval(s) * g.eval(s)).epsilon(1e-13));
    CHECK(dfg.eval(s) == doctest::Approx(leibniz.eval(s)).epsilon(1e-13));
  }
}

TEST_CASE("expsum: plus merges and scaled multiplies coefficients") {
  exp_sum f({{1.0, 2.0}, {3.0, 0.0}});
  exp_sum g({{2.0, 2.0}, {-1.0, 1.0}});
  exp_sum sum = f + g;
  CHECK(sum.eval(0.4) == doctest::Approx(f.eval(0.4) + g.eval(0.4)));
  exp_sum sc = -2.0 * f;
  CHECK(sc.eval(0.4) == doctest::Approx(-2.0 * f.eval(0.4)));
}

TEST_CASE("expsum: tilde equals f f'' - (f')^2 pointwise") {
  exp_sum f({{0.1625, 2.796}, {0.5942, -2.464}, {0.3786, -0.3324}});
  exp_sum t = f.tilde();
  exp_sum direct = f * f.derivative().derivative();
  exp_sum sq = f.derivative() * f.derivative();
  for (double s : {-1.0, 0.0, 0.5, 2.0}) {
    const double want = direct.eval(s) - sq.eval(s);
    CHECK(t.eval(s) == doctest::Approx(want).epsilon(1e-12));
  }
  // A single exponential has tilde identically zero: the diagonal pair
  // cancellation must be exact, not roundoff-sized.
  CHECK(exp_sum::single(3.0, 2.0).tilde().is_zero());
  CHECK(exp_sum::constant(5.0).tilde().is_zero());
}

TEST_CASE("expsum: tilde coefficient structure on a two-term sum") {
  // p e^{u s} + e^{-u s}: tilde = p (2u)^2 e^{0 s}, a pure constant.
  exp_sum f({{3.0, 2.0}, {1.0, -2.0}});
  exp_sum t = f.tilde();
  REQUIRE(t.size() == 1);
  CHECK(t.terms()[0].exponent == doctest::Approx(0.0));
  CHECK(t.terms()[0].coef == doctest::Approx(3.0 * 16.0));
}

TEST_CASE("expsum: signed_log_eval matches eval in the safe range") {
  exp_sum f({{-2.0, 1.0}, {5.0, -1.0}});  // crosses zero at s = ln(2.5)/2
  for (double s : {-2.0, 0.0, 0.3, 1.0, 4.0}) {
    const auto v = f.signed_log_eval(s);
    const double want = f.eval(s);
    REQUIRE(v.sign == (want > 0 ? 1 : (want < 0 ? -1 : 0)));
    if (v.sign != 0)
      CHECK(v.sign * std::exp(v.log_abs) == doctest::Approx(want).epsilon(1e-13));
    // log_scale bounds the largest term magnitude.
    const double big = std::max(2.0 * std::exp(s), 5.0 * std::exp(-s));
    CHECK(v.log_scale == doctest::Approx(std::log(big)).epsilon(1e-13));
  }
}

TEST_CASE("expsum: signed_log_eval handles arguments far past double overflow") {
  exp_sum f({{2.0, 3.0}, {1.0, -1.0}});
  const auto v = f.signed_log_eval(400.0);  // e^{1200} overflows double
  CHECK(v.sign == 1);
  CHECK(v.log_abs == doctest::Approx(std::log(2.0) + 1200.0).epsilon(1e-13));
  const auto w = f.signed_log_eval(-400.0);
  CHECK(w.sign == 1);
  CHECK(w.log_abs == doctest::Approx(400.0).epsilon(1e-13));
}

TEST_CASE("expsum: log_eval and log_derivative_at agree with direct formulas") {
  exp_sum f({{1.0, 3.0}, {4.0, -2.0}, {1.0, -1.0}});
  for (double s : {-1.0, 0.0, 0.8, 2.0}) {
    CHECK(f.log_eval(s) == doctest::Approx(std::log(f.eval(s))).epsilon(1e-13));
    CHECK(f.log_derivative_at(s) ==
          doctest::Approx(f.derivative().eval(s) / f.eval(s)).epsilon(1e-12));
  }
  // At huge s the log-derivative settles on the top exponent.
  CHECK(f.log_derivative_at(500.0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.log_eval(500.0) == doctest::Approx(1500.0).epsilon(1e-12));
  // Negative value refuses a log.
  exp_sum g({{-1.0, 1.0}});
  CHECK_THROWS_AS(g.log_eval(0.0), wegner::non_positive_coefficient);
}

TEST_CASE("expsum: dominant_log_derivative needs positive coefficients") {
  exp_sum f({{1.0, 3.0}, {4.0, -2.0}});
  CHECK(f.dominant_log_derivative() == doctest::Approx(3.0));
  exp_sum g({{-1.0, 3.0}, {4.0, -2.0}});
  CHECK_THROWS_AS(g.dominant_log_derivative(), wegner::non_positive_coefficient);
}
