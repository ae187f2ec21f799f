#pragma once

#include <vector>

#include "wegner/expsum.hpp"
#include "wegner/matrix.hpp"
#include "wegner/spectra.hpp"

namespace wegner {

// Closed-form solution of the band-generator flow for Hermitian tridiagonal
// matrices.  The k-th order profile is the subset expansion
//   eta_k = 4^{-k(k-1)/2} * sum_{|S|=k} (prod_{i in S} p_i)
//           * (prod_{i<j in S} (u_i-u_j)^2) * exp(sum_{i in S} u_i * s)
// over k-subsets of the flow exponents; eta_0 = 1 and eta_n is a constant.
// Diagonal entries come from successive log-derivatives, off-diagonal moduli
// from sqrt(eta_{k-1} eta_{k+1}) / eta_k.
struct tridiag_solution {
  double trace = 0.0;
  int n = 0;
  std::vector<double> u;              // descending, sum 0
  std::vector<double> p1;             // positive gate coefficients
  std::vector<exp_sum> etas;          // etas[k] = eta_{k+1}, k = 0 .. n-2
  double eta_n = 0.0;                 // top-order constant
  std::vector<int> b_signs;           // sign carried by each off-diagonal (real frame)
  std::vector<double> phases;         // constant phase of each off-diagonal entry
};

// Default dimension cap; the k-subset expansion has C(n, n/2) terms.
// Memory at n = 24 is ~2^24 terms * 16 bytes across all orders (~270 MB).
inline constexpr int tridiag_default_max_n = 24;

// Subset-expansion chain eta_1 .. eta_{n-1} for given exponents and positive
// coefficients.  Requires pairwise distinct u (degenerate_exponents
// otherwise) and positive p1 (non_positive_coefficient).
std::vector<exp_sum> eta_chain(const std::vector<double>& u, const std::vector<double>& p1,
                               int max_n = tridiag_default_max_n);

// The constant top-order profile prod p_i * prod_{i<j}(u_i-u_j)^2 / 4^{n(n-1)/2},
// computed in log space.
double eta_top_constant(const std::vector<double>& u, const std::vector<double>& p1);

// Relative deviation (prod p_i) / T - 1 from the fixed-trace target
// T = 2^{n(n-1)} / prod_{i<j} (u_i - u_j)^2.  Zero iff eta_n == 1.
double ff_residual(const std::vector<double>& u, const std::vector<double>& p1);

// The rescale p1 -> lambda p1 that zeroes ff_residual (lambda = (T/prod p)^{1/n}).
std::vector<double> rescale_to_ff(const std::vector<double>& u, const std::vector<double>& p1);

// Calibrate from a Hermitian tridiagonal matrix: eigendecompose, gate the
// coefficients on first components, carry off-diagonal signs and phases from
// the initial matrix.  Throws not_tridiagonal, degenerate_exponents,
// vanishing_component, dimension_unsupported (n > max_n).
tridiag_solution calibrate_tridiag(const hermitian_matrix& h0,
                                   int max_n = tridiag_default_max_n);

// Build a solution from flow data directly: exponents summing to zero (tol
// 1e-10 relative), positive coefficients satisfying the fixed-trace product
// condition to 1e-6 (ff_violation otherwise; rescale_to_ff first if needed).
// The matrix at s = 0 has positive sub-diagonal and zero phases.
tridiag_solution build_from_parameters(double trace, const std::vector<double>& u,
                                       const std::vector<double>& p1,
                                       int max_n = tridiag_default_max_n);

// State of the flow at time s.
hermitian_matrix eval_tridiag(const tridiag_solution& sol, double s);

}  // namespace wegner
