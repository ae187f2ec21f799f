#include "wegner/flow_numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "wegner/spectra.hpp"

namespace wegner {

integration_plan make_uniform_plan(double s_max, int steps, int n_samples,
                                   generator_kind generator) {
  integration_plan plan;
  plan.s_max = s_max;
  plan.steps = steps;
  plan.generator = generator;
  if (n_samples < 2) n_samples = 2;
  plan.samples.resize(n_samples);
  for (int i = 0; i < n_samples; ++i) plan.samples[i] = s_max * i / (n_samples - 1);
  return plan;
}

namespace {

hermitian_matrix hermitize(const complex_matrix& m) {
  const int n = m.size();
  complex_matrix out(n);
  for (int i = 0; i < n; ++i) {
    out(i, i) = complexd(m(i, i).real(), 0.0);
    for (int j = i + 1; j < n; ++j) {
      complexd v = 0.5 * (m(i, j) + std::conj(m(j, i)));
      out(i, j) = v;
      out(j, i) = std::conj(v);
    }
  }
  return hermitian_matrix::validate(out);
}

complex_matrix rhs_raw(const complex_matrix& m, generator_kind kind) {
  // Generator straight from the (near-Hermitian) stage matrix.
  const int n = m.size();
  complex_matrix g(n);
  if (kind == generator_kind::mielke) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        g(i, j) = m(i, j);
        g(j, i) = -std::conj(m(i, j));
      }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i != j) g(i, j) = (m(i, i).real() - m(j, j).real()) * m(i, j);
      }
  }
  return commutator(g, m);
}

}  // namespace

flow_trajectory integrate(const hermitian_matrix& h0, const integration_plan& plan) {
  if (plan.s_max <= 0.0) throw flow_error("integration horizon must be positive");
  if (plan.steps < 1) throw flow_error("integration needs at least one step");
  const double h = plan.s_max / plan.steps;
  const double rhs0 = flow_rhs(h0, plan.generator).frobenius_norm();
  if (rhs0 * h > 0.1) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "step %.3e too large for initial slope %.3e (product %.3e > 0.1); "
                  "increase steps",
                  h, rhs0, rhs0 * h);
    throw step_too_large(msg);
  }

  // Snap samples to the step grid; always record s = 0.
  std::vector<long> grid;
  grid.push_back(0);
  for (double s : plan.samples) {
    long idx = std::lround(std::clamp(s, 0.0, plan.s_max) / h);
    grid.push_back(std::min<long>(idx, plan.steps));
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  flow_trajectory traj;
  traj.generator = plan.generator;
  traj.samples.reserve(grid.size());

  complex_matrix state = h0.raw();
  std::size_t next = 0;
  for (long step = 0; step <= plan.steps; ++step) {
    if (next < grid.size() && grid[next] == step) {
      traj.samples.push_back({step * h, hermitize(state)});
      ++next;
    }
    if (step == plan.steps) break;
    complex_matrix k1 = rhs_raw(state, plan.generator);
    complex_matrix k2 = rhs_raw(state + 0.5 * h * k1, plan.generator);
    complex_matrix k3 = rhs_raw(state + 0.5 * h * k2, plan.generator);
    complex_matrix k4 = rhs_raw(state + h * k3, plan.generator);
    complex_matrix incr = k1 + 2.0 * k2 + 2.0 * k3 + k4;
    state += (h / 6.0) * incr;
    if (!state.all_finite()) {
      char msg[96];
      std::snprintf(msg, sizeof msg, "flow state left double range at s = %.6g", (step + 1) * h);
      throw non_finite_error(msg);
    }
    state = hermitize(state).raw();
  }
  return traj;
}

double eigen_drift(const flow_trajectory& traj) {
  if (traj.samples.empty()) return 0.0;
  std::vector<double> w0 = eigh(traj.samples.front().state).eigenvalues;
  double drift = 0.0;
  for (const auto& sample : traj.samples) {
    std::vector<double> w = eigh(sample.state).eigenvalues;
    for (std::size_t k = 0; k < w.size(); ++k) {
      drift = std::max(drift, std::fabs(w[k] - w0[k]));
    }
  }
  return drift;
}

double trace_drift(const flow_trajectory& traj) {
  if (traj.samples.empty()) return 0.0;
  double t0 = traj.samples.front().state.trace();
  double drift = 0.0;
  for (const auto& sample : traj.samples) {
    drift = std::max(drift, std::fabs(sample.state.trace() - t0));
  }
  return drift;
}

}  // namespace wegner
