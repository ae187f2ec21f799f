#pragma once

#include <complex>
#include <vector>

#include "wegner/errors.hpp"

namespace wegner {

using complexd = std::complex<double>;

// Dense square complex matrix, row-major.  Workhorse for generators and
// integrator internals where intermediates need not be Hermitian.
class complex_matrix {
 public:
  complex_matrix() = default;
  explicit complex_matrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n) {}

  int size() const { return n_; }
  complexd& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  const complexd& operator()(int i, int j) const {
    return a_[static_cast<std::size_t>(i) * n_ + j];
  }

  complex_matrix dagger() const;
  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;

  complex_matrix& operator+=(const complex_matrix& other);
  complex_matrix& operator*=(double factor);

 private:
  int n_ = 0;
  std::vector<complexd> a_;
};

complex_matrix operator+(complex_matrix a, const complex_matrix& b);
complex_matrix operator-(const complex_matrix& a, const complex_matrix& b);
complex_matrix operator*(const complex_matrix& a, const complex_matrix& b);
complex_matrix operator*(double c, complex_matrix a);

// a*b - b*a.
complex_matrix commutator(const complex_matrix& a, const complex_matrix& b);

// Value type with the invariant H(i,j) == conj(H(j,i)) exactly and real
// diagonal.  Construction goes through validate(), which rejects (never
// repairs) inputs whose Hermiticity deviation exceeds tolerance, then mirrors
// the upper triangle so the invariant holds to the last bit.
class hermitian_matrix {
 public:
  static constexpr double hermiticity_tol = 1e-12;

  hermitian_matrix() = default;

  // Throws hermiticity_violation (message includes the max deviation and its
  // position) or non_finite_error.
  static hermitian_matrix validate(const complex_matrix& candidate);
  static hermitian_matrix validate(const std::vector<std::vector<complexd>>& grid);

  int size() const { return m_.size(); }
  const complexd& at(int i, int j) const { return m_(i, j); }
  const complex_matrix& raw() const { return m_; }

  double trace() const;      // real by invariant
  double frobenius_norm() const { return m_.frobenius_norm(); }

 private:
  explicit hermitian_matrix(complex_matrix m) : m_(std::move(m)) {}
  complex_matrix m_;
};

enum class generator_kind { mielke, wegner };

// Band generator: strict upper triangle of h, negated conjugate below, zero
// diagonal.  Skew-Hermitian by construction; preserves tridiagonal band.
complex_matrix mielke_generator(const hermitian_matrix& h);

// Diagonal-commutator generator [diag(h), h]: entry (i,j) is (h_ii - h_jj) h_ij.
// Skew-Hermitian; does NOT preserve bands.
complex_matrix wegner_generator(const hermitian_matrix& h);

// [G(h), h] for the chosen generator; exactly Hermitian output (the
// commutator with a skew-Hermitian generator is Hermitian; roundoff is
// symmetrized away, which also keeps the trace of the change at zero).
hermitian_matrix flow_rhs(const hermitian_matrix& h, generator_kind kind);

struct invariants3 {
  double i1 = 0.0;  // trace
  double i2 = 0.0;  // (Tr(H^2) - (Tr H)^2) / 2
  double i3 = 0.0;  // determinant
};

// Characteristic-polynomial data for the 3x3 case, with the sign convention
// x^3 - i1 x^2 - i2 x - i3 = 0.  Throws dimension_unsupported for n != 3.
invariants3 principal_invariants(const hermitian_matrix& h);

// Sum of |h_ij|^2 over i != j.  The Mielke/Wegner flows drive this to zero.
double offdiag_sq_norm(const hermitian_matrix& h);

}  // namespace wegner
