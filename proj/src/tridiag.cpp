#include "wegner/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace wegner {

namespace {

void check_flow_exponents(const std::vector<double>& u, const std::vector<double>& p1,
                          int max_n) {
  const int n = static_cast<int>(u.size());
  if (n < 2) throw dimension_unsupported("chain needs at least two levels");
  if (n > max_n) {
    char msg[128];
    std::snprintf(msg, sizeof msg,
                  "dimension %d exceeds cap %d (subset expansion is C(n, n/2) terms)", n, max_n);
    throw dimension_unsupported(msg);
  }
  if (p1.size() != u.size()) throw flow_error("exponents and coefficients differ in length");
  double maxu = 0.0;
  for (double v : u) maxu = std::max(maxu, std::fabs(v));
  for (int i = 0; i < n; ++i) {
    if (!(p1[i] > 0.0)) {
      char msg[96];
      std::snprintf(msg, sizeof msg, "chain coefficient %d must be positive, got %.6g", i, p1[i]);
      throw non_positive_coefficient(msg);
    }
    for (int j = i + 1; j < n; ++j) {
      if (std::fabs(u[i] - u[j]) <= 1e-8 * std::max(maxu, 1e-300)) {
        char msg[96];
        std::snprintf(msg, sizeof msg, "flow exponents %d and %d coincide (%.6g)", i, j, u[i]);
        throw degenerate_exponents(msg);
      }
    }
  }
}

// Depth-first subset enumeration carrying the partial coefficient
// prod p_i * prod_{i<j} (u_i - u_j)^2 and the partial exponent sum.
void enumerate_subsets(const std::vector<double>& u, const std::vector<double>& p1, int start,
                       std::vector<int>& members, double coef, double expo,
                       std::vector<std::vector<exp_term>>& buckets) {
  const int n = static_cast<int>(u.size());
  for (int j = start; j < n; ++j) {
    double c = coef * p1[j];
    for (int m : members) {
      const double gap = u[m] - u[j];
      c *= gap * gap;
    }
    const double e = expo + u[j];
    members.push_back(j);
    buckets[members.size()].push_back({c, e});
    enumerate_subsets(u, p1, j + 1, members, c, e, buckets);
    members.pop_back();
  }
}

double log_ff_target(const std::vector<double>& u) {
  const int n = static_cast<int>(u.size());
  double log_t = n * (n - 1) * std::log(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) log_t -= 2.0 * std::log(std::fabs(u[i] - u[j]));
  return log_t;
}

bool near_zero_entry(const complexd& v, double tol) { return std::abs(v) <= tol; }

}  // namespace

std::vector<exp_sum> eta_chain(const std::vector<double>& u, const std::vector<double>& p1,
                               int max_n) {
  check_flow_exponents(u, p1, max_n);
  const int n = static_cast<int>(u.size());
  std::vector<std::vector<exp_term>> buckets(n + 1);
  std::vector<int> members;
  enumerate_subsets(u, p1, 0, members, 1.0, 0.0, buckets);
  std::vector<exp_sum> etas;
  etas.reserve(n - 1);
  double norm = 1.0;  // 4^{-k(k-1)/2}, updated incrementally
  for (int k = 1; k <= n - 1; ++k) {
    if (k > 1) norm /= std::pow(4.0, k - 1);
    std::vector<exp_term> terms = buckets[k];
    for (auto& t : terms) t.coef *= norm;
    etas.emplace_back(std::move(terms));
  }
  return etas;
}

double eta_top_constant(const std::vector<double>& u, const std::vector<double>& p1) {
  const int n = static_cast<int>(u.size());
  double log_v = -0.5 * n * (n - 1) * std::log(4.0);
  for (double p : p1) log_v += std::log(p);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) log_v += 2.0 * std::log(std::fabs(u[i] - u[j]));
  return std::exp(log_v);
}

double ff_residual(const std::vector<double>& u, const std::vector<double>& p1) {
  check_flow_exponents(u, p1, 64);
  double log_p = 0.0;
  for (double p : p1) log_p += std::log(p);
  return std::expm1(log_p - log_ff_target(u));
}

std::vector<double> rescale_to_ff(const std::vector<double>& u, const std::vector<double>& p1) {
  check_flow_exponents(u, p1, 64);
  double log_p = 0.0;
  for (double p : p1) log_p += std::log(p);
  const double lambda = std::exp((log_ff_target(u) - log_p) / static_cast<double>(u.size()));
  std::vector<double> out(p1);
  for (double& p : out) p *= lambda;
  return out;
}

tridiag_solution calibrate_tridiag(const hermitian_matrix& h0, int max_n) {
  const int n = h0.size();
  if (n < 2) throw dimension_unsupported("chain needs at least two levels");
  if (n > max_n) {
    char msg[96];
    std::snprintf(msg, sizeof msg,
                  "dimension %d exceeds cap %d (subset expansion is C(n, n/2) terms)", n, max_n);
    throw dimension_unsupported(msg);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 2; j < n; ++j) {
      if (!near_zero_entry(h0.at(i, j), 1e-12)) {
        char msg[96];
        std::snprintf(msg, sizeof msg, "entry (%d,%d) = %.3e lies outside the tridiagonal band",
                      i, j, std::abs(h0.at(i, j)));
        throw not_tridiagonal(msg);
      }
    }
  }
  tridiag_solution sol;
  sol.n = n;
  sol.trace = h0.trace();
  const spectrum sp = eigh(h0);
  sol.u = exponents(sp, sol.trace);
  sol.p1 = gate_coefficients(sp, gate_side::first);
  sol.etas = eta_chain(sol.u, sol.p1, max_n);
  sol.eta_n = eta_top_constant(sol.u, sol.p1);
  sol.b_signs.resize(n - 1);
  sol.phases.resize(n - 1);
  for (int k = 0; k + 1 < n; ++k) {
    const complexd v = h0.at(k, k + 1);
    if (std::fabs(v.imag()) <= 1e-14 * std::max(1.0, std::abs(v))) {
      sol.b_signs[k] = v.real() < 0.0 ? -1 : 1;
      sol.phases[k] = 0.0;
    } else {
      sol.b_signs[k] = 1;
      sol.phases[k] = std::arg(v);
    }
  }
  return sol;
}

tridiag_solution build_from_parameters(double trace, const std::vector<double>& u,
                                       const std::vector<double>& p1, int max_n) {
  check_flow_exponents(u, p1, max_n);
  double maxu = 0.0, sum = 0.0;
  for (double v : u) {
    maxu = std::max(maxu, std::fabs(v));
    sum += v;
  }
  if (std::fabs(sum) > 1e-10 * std::max(maxu, 1e-300)) {
    char msg[96];
    std::snprintf(msg, sizeof msg, "flow exponents must sum to zero, got %.6g", sum);
    throw flow_error(msg);
  }
  const double ff = ff_residual(u, p1);
  if (std::fabs(ff) > 1e-6) {
    char msg[128];
    std::snprintf(msg, sizeof msg,
                  "coefficient product misses the fixed-trace target by %.3e (rescale first)",
                  ff);
    throw ff_violation(msg);
  }
  tridiag_solution sol;
  sol.n = static_cast<int>(u.size());
  sol.trace = trace;
  sol.u = u;
  sol.p1 = p1;
  sol.etas = eta_chain(u, p1, max_n);
  sol.eta_n = eta_top_constant(u, p1);
  sol.b_signs.assign(sol.n - 1, 1);
  sol.phases.assign(sol.n - 1, 0.0);
  return sol;
}

hermitian_matrix eval_tridiag(const tridiag_solution& sol, double s) {
  // Entries are ratios of eta values, so everything runs in log space and
  // stays finite for flow times far beyond the exponential overflow point.
  const int n = sol.n;
  std::vector<double> logeta(n + 1);
  logeta[0] = 0.0;
  logeta[n] = std::log(sol.eta_n);
  std::vector<double> logd(n + 1, 0.0);  // log-derivatives; constants at both ends
  for (int k = 1; k <= n - 1; ++k) {
    logeta[k] = sol.etas[k - 1].log_eval(s);
    logd[k] = sol.etas[k - 1].log_derivative_at(s);
  }
  complex_matrix m(n);
  const double mean = sol.trace / n;
  for (int k = 0; k < n; ++k) {
    m(k, k) = mean - 0.5 * logd[k] + 0.5 * logd[k + 1];
  }
  for (int k = 0; k + 1 < n; ++k) {
    const double logb = 0.5 * (logeta[k] + logeta[k + 2]) - logeta[k + 1];
    const complexd v = sol.b_signs[k] * std::exp(logb) *
                       std::exp(complexd(0.0, sol.phases[k]));
    m(k, k + 1) = v;
    m(k + 1, k) = std::conj(v);
  }
  return hermitian_matrix::validate(m);
}

}  // namespace wegner
