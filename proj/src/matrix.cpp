#include "wegner/matrix.hpp"

#include <cmath>
#include <cstdio>

namespace wegner {

complex_matrix complex_matrix::dagger() const {
  complex_matrix out(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

double complex_matrix::frobenius_norm() const {
  double sum = 0.0;
  for (const auto& v : a_) sum += std::norm(v);
  return std::sqrt(sum);
}

double complex_matrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : a_) m = std::max(m, std::abs(v));
  return m;
}

bool complex_matrix::all_finite() const {
  for (const auto& v : a_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

complex_matrix& complex_matrix::operator+=(const complex_matrix& other) {
  for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += other.a_[k];
  return *this;
}

complex_matrix& complex_matrix::operator*=(double factor) {
  for (auto& v : a_) v *= factor;
  return *this;
}

complex_matrix operator+(complex_matrix a, const complex_matrix& b) {
  a += b;
  return a;
}

complex_matrix operator-(const complex_matrix& a, const complex_matrix& b) {
  complex_matrix out(a.size());
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < a.size(); ++j) out(i, j) = a(i, j) - b(i, j);
  return out;
}

complex_matrix operator*(const complex_matrix& a, const complex_matrix& b) {
  const int n = a.size();
  complex_matrix out(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const complexd aik = a(i, k);
      if (aik == complexd{}) continue;
      for (int j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

complex_matrix operator*(double c, complex_matrix a) {
  a *= c;
  return a;
}

complex_matrix commutator(const complex_matrix& a, const complex_matrix& b) {
  return a * b - b * a;
}

hermitian_matrix hermitian_matrix::validate(const complex_matrix& candidate) {
  const int n = candidate.size();
  if (!candidate.all_finite()) throw non_finite_error("matrix has non-finite entries");
  double scale = std::max(1.0, candidate.max_abs());
  double worst = 0.0;
  int wi = 0, wj = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double dev = std::abs(candidate(i, j) - std::conj(candidate(j, i)));
      if (dev > worst) {
        worst = dev;
        wi = i;
        wj = j;
      }
    }
  }
  if (worst > hermiticity_tol * scale) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "matrix is not Hermitian: |H(%d,%d) - conj(H(%d,%d))| = %.3e exceeds %.1e",
                  wi, wj, wj, wi, worst, hermiticity_tol * scale);
    throw hermiticity_violation(msg);
  }
  // Mirror the upper triangle so the invariant holds bit-exactly.
  complex_matrix m(n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = complexd(candidate(i, i).real(), 0.0);
    for (int j = i + 1; j < n; ++j) {
      m(i, j) = candidate(i, j);
      m(j, i) = std::conj(candidate(i, j));
    }
  }
  return hermitian_matrix(std::move(m));
}

hermitian_matrix hermitian_matrix::validate(const std::vector<std::vector<complexd>>& grid) {
  const int n = static_cast<int>(grid.size());
  complex_matrix m(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(grid[i].size()) != n) {
      throw dimension_unsupported("matrix rows have unequal lengths");
    }
    for (int j = 0; j < n; ++j) m(i, j) = grid[i][j];
  }
  return validate(m);
}

double hermitian_matrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < size(); ++i) t += m_(i, i).real();
  return t;
}

complex_matrix mielke_generator(const hermitian_matrix& h) {
  const int n = h.size();
  complex_matrix g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      g(i, j) = h.at(i, j);
      g(j, i) = -std::conj(h.at(i, j));
    }
  }
  return g;
}

complex_matrix wegner_generator(const hermitian_matrix& h) {
  const int n = h.size();
  complex_matrix g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      g(i, j) = (h.at(i, i).real() - h.at(j, j).real()) * h.at(i, j);
    }
  }
  return g;
}

hermitian_matrix flow_rhs(const hermitian_matrix& h, generator_kind kind) {
  complex_matrix g = kind == generator_kind::mielke ? mielke_generator(h) : wegner_generator(h);
  complex_matrix c = commutator(g, h.raw());
  // [G, H] with skew-Hermitian G is Hermitian; symmetrize roundoff away.
  const int n = h.size();
  complex_matrix out(n);
  for (int i = 0; i < n; ++i) {
    out(i, i) = complexd(c(i, i).real(), 0.0);
    for (int j = i + 1; j < n; ++j) {
      complexd v = 0.5 * (c(i, j) + std::conj(c(j, i)));
      out(i, j) = v;
      out(j, i) = std::conj(v);
    }
  }
  return hermitian_matrix::validate(out);
}

invariants3 principal_invariants(const hermitian_matrix& h) {
  if (h.size() != 3) {
    throw dimension_unsupported("principal_invariants requires a 3x3 matrix");
  }
  invariants3 inv;
  inv.i1 = h.trace();
  double tr_sq = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) tr_sq += (h.at(i, j) * h.at(j, i)).real();
  inv.i2 = 0.5 * (tr_sq - inv.i1 * inv.i1);
  const auto& m = h.raw();
  complexd det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                 m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                 m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  inv.i3 = det.real();
  return inv;
}

double offdiag_sq_norm(const hermitian_matrix& h) {
  double sum = 0.0;
  for (int i = 0; i < h.size(); ++i) {
    for (int j = 0; j < h.size(); ++j) {
      if (i != j) sum += std::norm(h.at(i, j));
    }
  }
  return sum;
}

}  // namespace wegner
