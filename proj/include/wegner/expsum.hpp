#pragma once

#include <vector>

#include "wegner/errors.hpp"

namespace wegner {

// One term of a finite sum of real exponentials: coef * exp(exponent * s).
struct exp_term {
  double coef = 0.0;
  double exponent = 0.0;
};

// Finite sum  sum_i coef_i * exp(exponent_i * s)  kept in canonical form:
// terms sorted by descending exponent, exponents closer than merge_tol
// merged by coefficient addition, terms with |coef| <= drop_tol removed.
// Immutable after construction; all operations return new values.
class exp_sum {
 public:
  static constexpr double merge_tol = 1e-11;
  static constexpr double drop_tol = 1e-300;
  // exp(x) overflows double a little above x = 709; stay under it.
  static constexpr double exp_arg_limit = 700.0;

  exp_sum() = default;  // the zero sum
  explicit exp_sum(std::vector<exp_term> terms);

  static exp_sum constant(double c);
  static exp_sum single(double coef, double exponent);

  const std::vector<exp_term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  // Sum of coefficients; equals eval(0) exactly.
  double value_at_zero() const;

  // Evaluate at s with compensated summation, largest exponent first.
  // Throws overflow_error if any term's exponent * s exceeds exp_arg_limit.
  double eval(double s) const;

  // Term-wise d/ds.  Constants vanish.
  exp_sum derivative() const;

  exp_sum scaled(double factor) const;
  exp_sum plus(const exp_sum& other) const;
  exp_sum times(const exp_sum& other) const;

  // f*f'' - (f')^2 as a closed form:
  //   sum_{i<j} c_i c_j (e_i - e_j)^2 exp((e_i + e_j) s).
  // Diagonal pairs cancel exactly and are never formed.
  exp_sum tilde() const;

  // Overflow-free evaluation: value = sign * exp(log_abs).  All exponentials
  // are taken relative to the extreme exponent on the side of s, so the
  // shifted arguments are nonpositive.  log_scale bounds log of the largest
  // term magnitude; it tells roundoff-level values from structural zeros.
  struct signed_log {
    int sign = 0;             // value = 0 when sign = 0
    double log_abs = 0.0;     // meaningful only when sign != 0
    double log_scale = 0.0;   // log(max_i |c_i e^{e_i s}|), -inf for empty
  };
  signed_log signed_log_eval(double s) const;

  // log(eval(s)) for sums with a positive value at s, overflow-free.
  // Throws non_positive_coefficient when the value is not positive.
  double log_eval(double s) const;

  // eval'(s) / eval(s), overflow-free.  Same positivity requirement.
  double log_derivative_at(double s) const;

  // Largest exponent present.  Requires every coefficient strictly positive
  // (otherwise the sum can vanish and the log-derivative limit is not the
  // top exponent); throws non_positive_coefficient.
  double dominant_log_derivative() const;

 private:
  std::vector<exp_term> terms_;  // descending exponent
};

inline exp_sum operator+(const exp_sum& a, const exp_sum& b) { return a.plus(b); }
inline exp_sum operator*(const exp_sum& a, const exp_sum& b) { return a.times(b); }
inline exp_sum operator*(double c, const exp_sum& a) { return a.scaled(c); }

}  // namespace wegner
