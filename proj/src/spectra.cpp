#include "wegner/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace wegner {

depressed_cubic depress(const invariants3& inv) {
  depressed_cubic c;
  c.p = -(inv.i1 * inv.i1 + 3.0 * inv.i2) / 3.0;
  c.q = -(2.0 * inv.i1 * inv.i1 * inv.i1 + 9.0 * inv.i1 * inv.i2 + 27.0 * inv.i3) / 27.0;
  return c;
}

std::array<double, 3> cubic_roots(const depressed_cubic& c) {
  const double p = c.p, q = c.q;
  const double disc = -4.0 * p * p * p - 27.0 * q * q;
  const double disc_scale = std::max({4.0 * std::fabs(p * p * p), 27.0 * q * q, 1e-300});
  if (disc < -1e-10 * disc_scale) {
    char msg[128];
    std::snprintf(msg, sizeof msg, "cubic has complex roots: discriminant %.6g (p=%.6g q=%.6g)",
                  disc, p, q);
    throw complex_roots_error(msg);
  }
  if (p >= 0.0) {
    // Real-root triples need p <= 0; passing the discriminant check with
    // p >= 0 forces p ~ q ~ 0: the triple zero.
    return {0.0, 0.0, 0.0};
  }
  double arg = 3.0 * q / (2.0 * p) * std::sqrt(-3.0 / p);
  if (std::fabs(arg) > 1.0 + 1e-12) {
    char msg[128];
    std::snprintf(msg, sizeof msg, "cubic arccos argument %.17g outside [-1, 1]", arg);
    throw complex_roots_error(msg);
  }
  arg = std::clamp(arg, -1.0, 1.0);
  const double theta = std::acos(arg) / 3.0;
  const double m = 2.0 * std::sqrt(-p / 3.0);
  std::array<double, 3> roots{};
  for (int k = 0; k < 3; ++k) {
    roots[k] = m * std::cos(theta - 2.0 * M_PI * k / 3.0);
  }
  std::sort(roots.begin(), roots.end(), std::greater<>());
  return roots;
}

namespace {

// One cyclic Jacobi pass; returns the rotations applied.
int jacobi_sweep(complex_matrix& h, complex_matrix& v, double skip_threshold) {
  const int n = h.size();
  int rotations = 0;
  for (int p = 0; p < n - 1; ++p) {
    for (int q = p + 1; q < n; ++q) {
      const complexd apq = h(p, q);
      const double r = std::abs(apq);
      if (r <= skip_threshold) continue;
      ++rotations;
      const double app = h(p, p).real();
      const double aqq = h(q, q).real();
      const complexd phase = apq / r;  // e^{i phi}
      const double tau = (aqq - app) / (2.0 * r);
      const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
      const double cs = 1.0 / std::sqrt(1.0 + t * t);
      const double sn = t * cs;
      const complexd s_fwd = sn * phase;              // s e^{i phi}
      const complexd s_bwd = std::conj(s_fwd);        // s e^{-i phi}

      for (int k = 0; k < n; ++k) {
        if (k == p || k == q) continue;
        const complexd hkp = h(k, p), hkq = h(k, q);
        h(k, p) = cs * hkp - s_bwd * hkq;
        h(k, q) = s_fwd * hkp + cs * hkq;
        h(p, k) = std::conj(h(k, p));
        h(q, k) = std::conj(h(k, q));
      }
      h(p, p) = complexd(cs * cs * app + sn * sn * aqq - 2.0 * sn * cs * r, 0.0);
      h(q, q) = complexd(sn * sn * app + cs * cs * aqq + 2.0 * sn * cs * r, 0.0);
      h(p, q) = complexd(0.0, 0.0);
      h(q, p) = complexd(0.0, 0.0);

      for (int k = 0; k < n; ++k) {
        const complexd vkp = v(k, p), vkq = v(k, q);
        v(k, p) = cs * vkp - s_bwd * vkq;
        v(k, q) = s_fwd * vkp + cs * vkq;
      }
    }
  }
  return rotations;
}

double offdiag_norm(const complex_matrix& h) {
  double sum = 0.0;
  for (int i = 0; i < h.size(); ++i)
    for (int j = 0; j < h.size(); ++j)
      if (i != j) sum += std::norm(h(i, j));
  return std::sqrt(sum);
}

}  // namespace

spectrum eigh(const hermitian_matrix& hm) {
  const int n = hm.size();
  if (n < 1 || n > 64) throw dimension_unsupported("eigh supports 1 <= n <= 64");
  complex_matrix h = hm.raw();
  complex_matrix v(n);
  for (int i = 0; i < n; ++i) v(i, i) = 1.0;

  const double norm0 = h.frobenius_norm();
  const double target = 1e-13 * norm0;
  constexpr int max_sweeps = 100;
  if (norm0 > 0.0) {
    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      if (offdiag_norm(h) <= target) {
        converged = true;
        break;
      }
      // Rotate anything above the per-entry share of the target.
      jacobi_sweep(h, v, target / (n * n));
    }
    if (!converged && offdiag_norm(h) > target) {
      char msg[128];
      std::snprintf(msg, sizeof msg,
                    "Jacobi eigensolver stalled: off-diagonal %.3e, target %.3e after %d sweeps",
                    offdiag_norm(h), target, max_sweeps);
      throw no_convergence(msg);
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return h(a, a).real() > h(b, b).real(); });

  spectrum sp;
  sp.eigenvalues.resize(n);
  sp.vectors.assign(n, std::vector<complexd>(n));
  for (int k = 0; k < n; ++k) {
    sp.eigenvalues[k] = h(order[k], order[k]).real();
    // Canonical phase: largest-modulus component made real nonnegative.
    int imax = 0;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      double a = std::abs(v(i, order[k]));
      if (a > best + 1e-15) {
        best = a;
        imax = i;
      }
    }
    complexd rot = best > 0.0 ? std::conj(v(imax, order[k])) / best : complexd(1.0, 0.0);
    for (int i = 0; i < n; ++i) sp.vectors[k][i] = v(i, order[k]) * rot;
  }
  return sp;
}

eigh_residual eigh_check(const hermitian_matrix& h, const spectrum& sp) {
  const int n = h.size();
  eigh_residual res;
  for (int k = 0; k < n; ++k) {
    double rr = 0.0;
    for (int i = 0; i < n; ++i) {
      complexd acc = -sp.eigenvalues[k] * sp.vectors[k][i];
      for (int j = 0; j < n; ++j) acc += h.at(i, j) * sp.vectors[k][j];
      rr += std::norm(acc);
    }
    res.eigen_residual = std::max(res.eigen_residual, std::sqrt(rr));
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      complexd dot = 0.0;
      for (int i = 0; i < n; ++i) dot += std::conj(sp.vectors[a][i]) * sp.vectors[b][i];
      double want = a == b ? 1.0 : 0.0;
      res.ortho_defect = std::max(res.ortho_defect, std::abs(dot - want));
    }
  }
  return res;
}

std::vector<double> exponents(const spectrum& sp, double trace) {
  const int n = static_cast<int>(sp.eigenvalues.size());
  std::vector<double> u(n);
  for (int k = 0; k < n; ++k) u[k] = 2.0 * (sp.eigenvalues[k] - trace / n);
  return u;  // eigenvalues descending, so u descending
}

std::vector<double> gate_coefficients(const spectrum& sp, gate_side side) {
  const int n = static_cast<int>(sp.eigenvalues.size());
  const int pos = side == gate_side::first ? 0 : n - 1;
  std::vector<double> c(n);
  for (int k = 0; k < n; ++k) {
    double a = std::abs(sp.vectors[k][pos]);
    if (a <= 1e-12) {
      char msg[128];
      std::snprintf(msg, sizeof msg,
                    "eigenvector %d has vanishing boundary component (%.3e): chain decouples",
                    k, a);
      throw vanishing_component(msg);
    }
    c[k] = a * a;
  }
  return c;
}

}  // namespace wegner
