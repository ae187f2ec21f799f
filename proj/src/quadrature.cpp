#include "wegner/quadrature.hpp"

#include <cmath>
#include <queue>
#include <vector>

namespace wegner {

namespace {

// One refinement panel [a, a+h] holding the five-point Simpson data.  v is the
// Richardson-extrapolated value, e the standard |S2 - S1| / 15 estimate.
struct panel {
  double a = 0.0, h = 0.0;
  double fa = 0.0, flm = 0.0, fm = 0.0, frm = 0.0, fb = 0.0;
  double v = 0.0, e = 0.0;
};

struct panel_order {
  bool operator()(const panel& x, const panel& y) const { return x.e < y.e; }
};

double eval_checked(const std::function<double(double)>& f, double t) {
  const double v = f(t);
  if (!std::isfinite(v)) throw quadrature_failure("integrand is not finite on the interval");
  return v;
}

// Fill the quarter-point values and the Simpson data of a panel whose endpoint
// and midpoint values are already known.  Returns false when the quarter
// points are not representable strictly inside the panel (width at machine
// resolution); v then falls back to the three-point rule and e to zero.
bool refine(panel& p, const std::function<double(double)>& f) {
  const double lm = p.a + 0.25 * p.h;
  const double m = p.a + 0.5 * p.h;
  const double rm = p.a + 0.75 * p.h;
  const double s1 = p.h / 6.0 * (p.fa + 4.0 * p.fm + p.fb);
  const bool ascending = p.a < lm && lm < m && m < rm && rm < p.a + p.h;
  const bool descending = p.a > lm && lm > m && m > rm && rm > p.a + p.h;
  if (!ascending && !descending) {
    p.v = s1;
    p.e = 0.0;
    return false;
  }
  p.flm = eval_checked(f, lm);
  p.frm = eval_checked(f, rm);
  const double s2 = p.h / 12.0 * (p.fa + 4.0 * p.flm + 2.0 * p.fm + 4.0 * p.frm + p.fb);
  p.v = s2 + (s2 - s1) / 15.0;
  p.e = std::fabs(s2 - s1) / 15.0;
  return true;
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, long max_subdivisions) {
  if (a == b) return 0.0;

  panel root;
  root.a = a;
  root.h = b - a;
  root.fa = eval_checked(f, a);
  root.fm = eval_checked(f, 0.5 * (a + b));
  root.fb = eval_checked(f, b);
  const bool root_live = refine(root, f);

  // Worst-first refinement: split the panel with the largest error estimate
  // until the estimates sum below the tolerance.  Panels retire (value banked,
  // estimate dropped) at machine-resolution width, or when splitting stops
  // shrinking the estimate while it sits many digits below the panel's own
  // contribution: past that point the five-point rule measures arithmetic
  // noise in the integrand, not structure, and no split can improve it.
  std::priority_queue<panel, std::vector<panel>, panel_order> heap;
  double settled = 0.0, settled_c = 0.0;  // Neumaier accumulator for retired panels
  auto bank = [&](double x) {
    const double t = settled + x;
    settled_c += std::fabs(settled) >= std::fabs(x) ? (settled - t) + x : (x - t) + settled;
    settled = t;
  };
  long double total_err = 0.0L;
  auto place = [&](const panel& p, bool live) {
    if (live && p.e > 0.0) {
      total_err += p.e;
      heap.push(p);
    } else {
      bank(p.v);
    }
  };
  place(root, root_live);

  long budget = max_subdivisions;
  while (!heap.empty() && total_err > abs_tol) {
    if (--budget <= 0) {
      throw quadrature_failure("adaptive quadrature exhausted its subdivision budget");
    }
    const panel p = heap.top();
    heap.pop();
    total_err -= p.e;
    if (total_err < 0.0L) total_err = 0.0L;

    panel l, r;
    l.a = p.a;
    l.h = 0.5 * p.h;
    l.fa = p.fa;
    l.fm = p.flm;
    l.fb = p.fm;
    r.a = p.a + l.h;
    r.h = l.h;
    r.fa = p.fm;
    r.fm = p.frm;
    r.fb = p.fb;
    const bool l_live = refine(l, f);
    const bool r_live = refine(r, f);

    const double pair_e = l.e + r.e;
    const bool noise =
        pair_e >= 0.5 * p.e && pair_e <= 0x1p-26 * (std::fabs(l.v) + std::fabs(r.v));
    if (noise) {
      bank(l.v);
      bank(r.v);
      continue;
    }
    place(l, l_live);
    place(r, r_live);
  }

  while (!heap.empty()) {
    bank(heap.top().v);
    heap.pop();
  }
  return settled + settled_c;
}

}  // namespace wegner
