#pragma once

#include <array>
#include <vector>

#include "wegner/matrix.hpp"

namespace wegner {

// x^3 + p x + q with all-real roots expected (discriminant -4p^3 - 27q^2
// nonnegative up to roundoff for Hermitian-derived input).
struct depressed_cubic {
  double p = 0.0;
  double q = 0.0;
};

// Shift the monic characteristic cubic x^3 - i1 x^2 - i2 x - i3 to depressed
// form: p = -(i1^2 + 3 i2)/3, q = -(2 i1^3 + 9 i1 i2 + 27 i3)/27.
depressed_cubic depress(const invariants3& inv);

// Trigonometric real-root formula, returned in descending order.
// Roots of the *depressed* cubic (add i1/3 back for eigenvalue shifts).
// p ~ 0, q ~ 0 gives the triple zero; p ~ 0 with q away from zero means
// complex roots (complex_roots_error), as does a clearly negative
// discriminant.  The arccos argument is clamped when within 1e-12 of +-1.
std::array<double, 3> cubic_roots(const depressed_cubic& c);

struct spectrum {
  std::vector<double> eigenvalues;            // descending
  std::vector<std::vector<complexd>> vectors;  // vectors[k] is the k-th column
};

// Cyclic complex Jacobi eigensolver.  Deterministic sweep order, column
// phases canonicalized (largest-modulus component real nonnegative).
// Converges when the off-diagonal norm falls below 1e-13 * ||H||_F; throws
// no_convergence after 100 sweeps, dimension_unsupported above 64.
spectrum eigh(const hermitian_matrix& h);

// Residual diagnostics for a computed spectrum: max ||H v - w v||_2 and the
// max orthonormality defect |V^H V - I|.
struct eigh_residual {
  double eigen_residual = 0.0;
  double ortho_defect = 0.0;
};
eigh_residual eigh_check(const hermitian_matrix& h, const spectrum& sp);

// Flow exponents u_k = 2 (w_k - trace/n), descending; they sum to zero.
std::vector<double> exponents(const spectrum& sp, double trace);

enum class gate_side { first, last };

// Squared moduli of the chosen boundary component of each unit eigenvector.
// These gate the closed tridiagonal chain.  Throws vanishing_component when
// any component modulus is at or below 1e-12 (decoupled chain).
std::vector<double> gate_coefficients(const spectrum& sp, gate_side side);

}  // namespace wegner
