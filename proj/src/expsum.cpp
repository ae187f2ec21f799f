#include "wegner/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace wegner {

namespace {

std::vector<exp_term> canonicalize(std::vector<exp_term> terms) {
  for (const auto& t : terms) {
    if (!std::isfinite(t.coef) || !std::isfinite(t.exponent)) {
      throw non_finite_error("exp_sum term is not finite");
    }
  }
  std::sort(terms.begin(), terms.end(),
            [](const exp_term& a, const exp_term& b) { return a.exponent > b.exponent; });
  std::vector<exp_term> out;
  out.reserve(terms.size());
  std::size_t i = 0;
  while (i < terms.size()) {
    // Merge the run of exponents within merge_tol of the run head.
    double coef = terms[i].coef;
    double wsum = std::fabs(terms[i].coef);
    double wexp = std::fabs(terms[i].coef) * terms[i].exponent;
    std::size_t j = i + 1;
    while (j < terms.size() && terms[i].exponent - terms[j].exponent <= exp_sum::merge_tol) {
      coef += terms[j].coef;
      wsum += std::fabs(terms[j].coef);
      wexp += std::fabs(terms[j].coef) * terms[j].exponent;
      ++j;
    }
    double exponent = wsum > 0.0 ? wexp / wsum : terms[i].exponent;
    if (std::fabs(coef) > exp_sum::drop_tol) out.push_back({coef, exponent});
    i = j;
  }
  return out;
}

}  // namespace

exp_sum::exp_sum(std::vector<exp_term> terms) : terms_(canonicalize(std::move(terms))) {}

exp_sum exp_sum::constant(double c) { return exp_sum({{c, 0.0}}); }

exp_sum exp_sum::single(double coef, double exponent) { return exp_sum({{coef, exponent}}); }

double exp_sum::value_at_zero() const {
  double sum = 0.0, comp = 0.0;
  for (const auto& t : terms_) {
    double y = t.coef - comp;
    double next = sum + y;
    comp = (next - sum) - y;
    sum = next;
  }
  return sum;
}

double exp_sum::eval(double s) const {
  double sum = 0.0, comp = 0.0;
  for (const auto& t : terms_) {
    double arg = t.exponent * s;
    if (arg > exp_arg_limit) {
      char msg[128];
      std::snprintf(msg, sizeof msg, "exp_sum eval overflows: exponent %.6g at s = %.6g",
                    t.exponent, s);
      throw overflow_error(msg);
    }
    double y = t.coef * std::exp(arg) - comp;
    double next = sum + y;
    comp = (next - sum) - y;
    sum = next;
  }
  return sum;
}

exp_sum exp_sum::derivative() const {
  std::vector<exp_term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back({t.coef * t.exponent, t.exponent});
  return exp_sum(std::move(out));
}

exp_sum exp_sum::scaled(double factor) const {
  std::vector<exp_term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back({t.coef * factor, t.exponent});
  return exp_sum(std::move(out));
}

exp_sum exp_sum::plus(const exp_sum& other) const {
  std::vector<exp_term> out;
  out.reserve(terms_.size() + other.terms_.size());
  out.insert(out.end(), terms_.begin(), terms_.end());
  out.insert(out.end(), other.terms_.begin(), other.terms_.end());
  return exp_sum(std::move(out));
}

exp_sum exp_sum::times(const exp_sum& other) const {
  std::vector<exp_term> out;
  out.reserve(terms_.size() * other.terms_.size());
  for (const auto& a : terms_) {
    for (const auto& b : other.terms_) {
      out.push_back({a.coef * b.coef, a.exponent + b.exponent});
    }
  }
  return exp_sum(std::move(out));
}

exp_sum exp_sum::tilde() const {
  // f f'' - (f')^2: diagonal terms cancel; the (i, j) cross pair contributes
  // c_i c_j (e_i - e_j)^2 on the combined exponent.
  std::vector<exp_term> out;
  if (terms_.size() >= 2) out.reserve(terms_.size() * (terms_.size() - 1) / 2);
  for (std::size_t i = 0; i + 1 < terms_.size(); ++i) {
    for (std::size_t j = i + 1; j < terms_.size(); ++j) {
      double gap = terms_[i].exponent - terms_[j].exponent;
      out.push_back({terms_[i].coef * terms_[j].coef * gap * gap,
                     terms_[i].exponent + terms_[j].exponent});
    }
  }
  return exp_sum(std::move(out));
}

exp_sum::signed_log exp_sum::signed_log_eval(double s) const {
  signed_log out;
  out.log_scale = -std::numeric_limits<double>::infinity();
  if (terms_.empty()) return out;
  // Shift by the extreme exponent on the side of s so every shifted argument
  // is nonpositive and the shifted sum cannot overflow.
  const double shift = s >= 0.0 ? terms_.front().exponent : terms_.back().exponent;
  double sum = 0.0, comp = 0.0, peak = 0.0;
  for (const auto& t : terms_) {
    const double w = t.coef * std::exp((t.exponent - shift) * s);
    peak = std::max(peak, std::fabs(w));
    double y = w - comp;
    double next = sum + y;
    comp = (next - sum) - y;
    sum = next;
  }
  out.log_scale = shift * s + std::log(peak);
  if (sum == 0.0) return out;
  out.sign = sum > 0.0 ? 1 : -1;
  out.log_abs = shift * s + std::log(std::fabs(sum));
  return out;
}

double exp_sum::log_eval(double s) const {
  const signed_log v = signed_log_eval(s);
  if (v.sign <= 0) {
    char msg[96];
    std::snprintf(msg, sizeof msg, "log_eval of a sum that is not positive at s = %.6g", s);
    throw non_positive_coefficient(msg);
  }
  return v.log_abs;
}

double exp_sum::log_derivative_at(double s) const {
  if (terms_.empty()) throw non_positive_coefficient("log_derivative_at of the zero sum");
  const double shift = s >= 0.0 ? terms_.front().exponent : terms_.back().exponent;
  double num = 0.0, den = 0.0;
  for (const auto& t : terms_) {
    const double w = t.coef * std::exp((t.exponent - shift) * s);
    num += t.exponent * w;
    den += w;
  }
  if (!(den > 0.0) && !(den < 0.0)) {
    char msg[96];
    std::snprintf(msg, sizeof msg, "log_derivative_at where the sum vanishes, s = %.6g", s);
    throw non_positive_coefficient(msg);
  }
  return num / den;
}

double exp_sum::dominant_log_derivative() const {
  if (terms_.empty()) {
    throw non_positive_coefficient("dominant_log_derivative of the zero sum");
  }
  for (const auto& t : terms_) {
    if (t.coef <= 0.0) {
      char msg[128];
      std::snprintf(msg, sizeof msg,
                    "dominant_log_derivative needs positive coefficients, got %.6g", t.coef);
      throw non_positive_coefficient(msg);
    }
  }
  return terms_.front().exponent;
}

}  // namespace wegner
