#pragma once

#include <vector>

#include "wegner/matrix.hpp"

namespace wegner {

// Fixed-step integration request.  Samples are flow times at which the state
// is recorded; they are snapped to the step grid and always include s = 0.
struct integration_plan {
  double s_max = 5.0;
  int steps = 5000;
  std::vector<double> samples;  // ascending, within [0, s_max]
  generator_kind generator = generator_kind::mielke;
};

// Uniform plan helper: n_samples points evenly spaced over [0, s_max]
// (s = 0 included).
integration_plan make_uniform_plan(double s_max, int steps, int n_samples,
                                   generator_kind generator = generator_kind::mielke);

struct trajectory_sample {
  double s = 0.0;
  hermitian_matrix state;
};

struct flow_trajectory {
  std::vector<trajectory_sample> samples;  // ascending s, starts at 0
  generator_kind generator = generator_kind::mielke;
};

// Classic fixed-step RK4 on dH/ds = [G(H), H].  The state is re-Hermitized
// every step (roundoff only; the exact flow is isospectral and Hermitian).
// Stability guard: ||rhs(H0)||_F * h <= 0.1, else step_too_large.  Throws
// non_finite_error if the state leaves double range.
flow_trajectory integrate(const hermitian_matrix& h0, const integration_plan& plan);

// Max over samples of the Hausdorff distance between sorted eigenvalues of
// the sample and of the initial state.  The flow is isospectral, so this
// measures integrator quality.
double eigen_drift(const flow_trajectory& traj);

// Max over samples of |trace - trace(0)|.
double trace_drift(const flow_trajectory& traj);

}  // namespace wegner
