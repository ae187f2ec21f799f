#pragma once

#include <functional>

#include "wegner/errors.hpp"

namespace wegner {

// Globally adaptive Simpson quadrature: panels carry the five-point Richardson
// error estimate |S2 - S1|/15 and the worst panel is split first, until the
// estimates sum below abs_tol.  A panel is retired early once its width
// reaches machine resolution, or once splitting stops shrinking its estimate
// while that estimate sits many digits below the panel's own contribution
// (the rule is then measuring arithmetic noise in the integrand rather than
// structure, and no split can improve on it).  The budget counts panel
// splits.  Throws quadrature_failure on a non-finite integrand value or when
// the budget runs out before the estimates converge.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, long max_subdivisions = 1000000);

}  // namespace wegner
