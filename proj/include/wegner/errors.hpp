#pragma once

#include <stdexcept>
#include <string>

namespace wegner {

// Base for every error this library throws on purpose.
struct flow_error : std::runtime_error {
  explicit flow_error(const std::string& what) : std::runtime_error(what) {}
};

// Input matrix is not Hermitian within tolerance, or has a non-real diagonal.
struct hermiticity_violation : flow_error {
  using flow_error::flow_error;
};

// NaN or infinity encountered in input or during a computation.
struct non_finite_error : flow_error {
  using flow_error::flow_error;
};

// Operation asked for a matrix dimension it does not support.
struct dimension_unsupported : flow_error {
  using flow_error::flow_error;
};

// exp(exponent * s) would overflow double range.
struct overflow_error : flow_error {
  using flow_error::flow_error;
};

// A sum-of-exponentials needed strictly positive coefficients and got one <= 0.
struct non_positive_coefficient : flow_error {
  using flow_error::flow_error;
};

// Cubic discriminant says the roots are not all real.
struct complex_roots_error : flow_error {
  using flow_error::flow_error;
};

// Iterative eigensolver did not reach its off-diagonal target.
struct no_convergence : flow_error {
  using flow_error::flow_error;
};

// An eigenvector component that must be nonzero (a chain gate) vanished.
struct vanishing_component : flow_error {
  using flow_error::flow_error;
};

// Requested integrator step fails the stability guard.
struct step_too_large : flow_error {
  using flow_error::flow_error;
};

// A quantity that must be a square came out negative beyond tolerance.
struct negative_radicand : flow_error {
  using flow_error::flow_error;
};

// Adaptive quadrature could not reach its tolerance within the budget.
struct quadrature_failure : flow_error {
  using flow_error::flow_error;
};

// The two largest flow exponents coincide while the rest do not; the
// closed-form calibration has no branch for this shape.  Unreachable for
// Hermitian input; kept as a guard.
struct top_pair_degenerate : flow_error {
  using flow_error::flow_error;
};

// Closed-form chain requires pairwise distinct flow exponents.
struct degenerate_exponents : flow_error {
  using flow_error::flow_error;
};

// Matrix has entries beyond the first off-diagonal.
struct not_tridiagonal : flow_error {
  using flow_error::flow_error;
};

// Fixed-trace product condition on chain coefficients is violated.
struct ff_violation : flow_error {
  using flow_error::flow_error;
};

// Operation needs a real symmetric matrix and got complex entries.
struct not_real_symmetric : flow_error {
  using flow_error::flow_error;
};

// Sampled trajectory is too coarse for reconstruction.
struct too_sparse : flow_error {
  using flow_error::flow_error;
};

// Closed-form solver has no branch for this input shape.
struct unsupported_exact_case : flow_error {
  using flow_error::flow_error;
};

// Calibration produced values violating its own interior checks.
struct calibration_error : flow_error {
  using flow_error::flow_error;
};

}  // namespace wegner
