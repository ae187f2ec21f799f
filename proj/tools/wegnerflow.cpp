#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wegner/closed3.hpp"
#include "wegner/flow_numeric.hpp"
#include "wegner/io.hpp"
#include "wegner/spectra.hpp"
#include "wegner/tridiag.hpp"
#include "wegner/verify4.hpp"

namespace {

using namespace wegner;

constexpr int kExitPass = 0;
constexpr int kExitTolerance = 1;
constexpr int kExitInput = 2;
constexpr int kExitUnsupported = 3;

bool is_tridiagonal(const hermitian_matrix& h) {
  for (int i = 0; i < h.size(); ++i)
    for (int j = i + 2; j < h.size(); ++j)
      if (std::abs(h.at(i, j)) > 1e-12) return false;
  return true;
}

bool has_complex_entry(const hermitian_matrix& h) {
  for (int i = 0; i < h.size(); ++i)
    for (int j = i + 1; j < h.size(); ++j)
      if (h.at(i, j).imag() != 0.0) return true;
  return false;
}

// Exact solver behind one evaluation interface, chosen by matrix shape.
struct exact_solver {
  std::unique_ptr<exact2_solution> two;
  std::unique_ptr<exact3_solution> three;
  std::unique_ptr<tridiag_solution> chain;

  static exact_solver build(const hermitian_matrix& h0) {
    exact_solver sv;
    if (h0.size() == 2) {
      sv.two = std::make_unique<exact2_solution>(exact2x2(h0));
    } else if (h0.size() == 3) {
      sv.three = std::make_unique<exact3_solution>(calibrate3(h0));
    } else if (is_tridiagonal(h0)) {
      sv.chain = std::make_unique<tridiag_solution>(calibrate_tridiag(h0));
    } else {
      throw unsupported_exact_case(
          "closed form needs n in {2, 3} or a tridiagonal matrix");
    }
    return sv;
  }

  hermitian_matrix at(double s) const {
    if (two) return eval2(*two, s);
    if (three) return eval3(*three, s);
    return eval_tridiag(*chain, s);
  }

  bool emits_phases(const hermitian_matrix& h0) const {
    return three != nullptr && has_complex_entry(h0);
  }
};

std::vector<double> uniform_times(double s_max, int samples) {
  std::vector<double> out(samples);
  for (int i = 0; i < samples; ++i) out[i] = s_max * i / (samples - 1);
  return out;
}

void emit_csv(const std::string& out_path, int n, const std::vector<trajectory_row>& rows) {
  if (out_path.empty()) {
    write_trajectory_csv(std::cout, n, rows);
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw flow_error("cannot open output file " + out_path);
  write_trajectory_csv(f, n, rows);
}

int cmd_eig(const std::string& path) {
  const hermitian_matrix h = load_matrix_json(path);
  const spectrum sp = eigh(h);
  const std::vector<double> u = exponents(sp, h.trace());
  std::string eig_line = "eigenvalues:", u_line = "exponents:";
  for (int i = 0; i < h.size(); ++i) {
    eig_line += " " + format_g17(sp.eigenvalues[i]);
    u_line += " " + format_g17(u[i]);
  }
  std::cout << eig_line << "\n" << u_line << "\n";
  if (h.size() == 3) {
    const depressed_cubic dc = depress(principal_invariants(h));
    const auto roots = cubic_roots(dc);
    std::cout << "P: " << format_g17(dc.p) << "\nQ: " << format_g17(dc.q) << "\n";
    std::cout << "trig roots:";
    for (double r : roots) std::cout << " " << format_g17(r);
    std::cout << "\n";
  }
  return kExitPass;
}

int cmd_flow(const std::string& path, const std::string& method, const std::string& generator,
             double s_max, int steps, int samples, const std::string& out_path) {
  const hermitian_matrix h0 = load_matrix_json(path);
  const generator_kind gen =
      generator == "wegner" ? generator_kind::wegner : generator_kind::mielke;
  std::vector<trajectory_row> rows;
  if (method == "exact") {
    if (gen == generator_kind::wegner)
      throw unsupported_exact_case("no closed form for the wegner generator");
    const exact_solver sv = exact_solver::build(h0);
    const std::vector<double> times = uniform_times(s_max, samples);
    std::vector<phase_triple> phases;
    const bool with_phases = sv.emits_phases(h0);
    if (with_phases) phases = phase_series(*sv.three, times);
    rows.reserve(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
      trajectory_row row;
      row.s = times[i];
      row.h = sv.at(times[i]);
      if (with_phases) row.phases = phases[i];
      rows.push_back(std::move(row));
    }
  } else {
    const integration_plan plan = make_uniform_plan(s_max, steps, samples, gen);
    const flow_trajectory traj = integrate(h0, plan);
    rows.reserve(traj.samples.size());
    for (const auto& sm : traj.samples) rows.push_back({sm.s, sm.state, std::nullopt});
  }
  emit_csv(out_path, h0.size(), rows);
  return kExitPass;
}

int cmd_compare(const std::string& path, const std::string& generator, double s_max, int steps,
                int samples, double tolerance) {
  const hermitian_matrix h0 = load_matrix_json(path);
  if (generator == "wegner")
    throw unsupported_exact_case("no closed form for the wegner generator");
  const exact_solver sv = exact_solver::build(h0);
  const integration_plan plan = make_uniform_plan(s_max, steps, samples);
  const flow_trajectory traj = integrate(h0, plan);
  double max_dev = 0.0, at_s = 0.0;
  for (const auto& sm : traj.samples) {
    const hermitian_matrix ex = sv.at(sm.s);
    for (int i = 0; i < h0.size(); ++i) {
      for (int j = 0; j < h0.size(); ++j) {
        const double d = std::abs(ex.at(i, j) - sm.state.at(i, j));
        if (d > max_dev) {
          max_dev = d;
          at_s = sm.s;
        }
      }
    }
  }
  std::cout << "max deviation: " << format_g17(max_dev) << " at s = " << format_g17(at_s)
            << "\n";
  std::cout << "trace drift: " << format_g17(trace_drift(traj)) << "\n";
  std::cout << "eigenvalue drift: " << format_g17(eigen_drift(traj)) << "\n";
  std::cout << "tolerance: " << format_g17(tolerance) << "\n";
  const bool pass = max_dev <= tolerance;
  std::cout << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kExitPass : kExitTolerance;
}

int cmd_tridiag_build(double trace, std::vector<double> u, std::vector<double> p,
                      bool rescale, const std::string& out_path) {
  if (rescale) p = rescale_to_ff(u, p);
  const tridiag_solution sol = build_from_parameters(trace, u, p);
  std::cout << "ff residual: " << format_g17(ff_residual(u, p)) << "\n";
  for (std::size_t k = 0; k < sol.etas.size(); ++k)
    std::cout << "eta_" << (k + 1) << " terms: " << sol.etas[k].size() << "\n";
  const hermitian_matrix h0 = eval_tridiag(sol, 0.0);
  const spectrum sp = eigh(h0);
  double spectrum_dev = 0.0;
  for (int i = 0; i < sol.n; ++i) {
    const double target = trace / sol.n + 0.5 * u[i];
    double best = std::fabs(sp.eigenvalues[0] - target);
    for (double w : sp.eigenvalues) best = std::min(best, std::fabs(w - target));
    spectrum_dev = std::max(spectrum_dev, best);
  }
  std::cout << "spectrum check: max |eig - target| = " << format_g17(spectrum_dev) << "\n";
  const std::string json = matrix_to_json(h0);
  if (out_path.empty()) {
    std::cout << json;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw flow_error("cannot open output file " + out_path);
    f << json;
    std::cout << "wrote " << out_path << "\n";
  }
  return kExitPass;
}

int cmd_verify4(const std::string& path, double s_max, int steps, int samples,
                bool plan_given) {
  const hermitian_matrix h0 = load_matrix_json(path);
  integration_plan plan = default_verify4_plan(h0);
  if (plan_given) plan = make_uniform_plan(s_max, steps, samples);
  const bool gated = std::abs(h0.at(0, 3)) <= 1e-12;
  const residual4_report rep =
      gated ? residuals_g0zero(h0, plan) : residuals_general(h0, plan);
  constexpr double gamma_thr = 1e-5, beta_thr = 1e-4, rho_thr = 1e-4, fit_thr = 1e-5,
                   delta_thr = 1e-4;
  std::cout << "gamma product drift: " << format_g17(rep.gamma_product_drift) << "\n";
  for (int k = 0; k < 3; ++k)
    std::cout << "beta residual " << (k + 1) << ": " << format_g17(rep.beta_residuals[k])
              << "\n";
  for (int k = 0; k < 3; ++k)
    std::cout << "rho condition residual " << (k + 1) << ": "
              << format_g17(rep.rho_condition_residuals[k]) << "\n";
  if (rep.deltas_gated)
    for (int k = 0; k < 2; ++k)
      std::cout << "delta ratio drift " << (k + 1) << ": "
                << format_g17(rep.delta_ratio_drift[k]) << "\n";
  std::cout << "eta2 fit residual: " << format_g17(rep.eta2_fit_residual) << "\n";
  std::cout << "fit condition bound: " << format_g17(rep.fit_condition) << "\n";
  bool pass = rep.gamma_product_drift <= gamma_thr && rep.eta2_fit_residual <= fit_thr;
  for (int k = 0; k < 3; ++k)
    pass = pass && rep.beta_residuals[k] <= beta_thr &&
           rep.rho_condition_residuals[k] <= rho_thr;
  if (rep.deltas_gated)
    for (int k = 0; k < 2; ++k) pass = pass && rep.delta_ratio_drift[k] <= delta_thr;
  std::cout << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kExitPass : kExitTolerance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"closed-form and numeric Wegner flow for small Hermitian matrices"};
  app.require_subcommand(1);

  std::string file, out_path;
  std::string method = "exact", generator = "mielke";
  double s_max = 5.0, tolerance = 1e-6, trace = 0.0;
  int steps = 5000, samples = 200;
  std::vector<double> exps, coeffs;
  bool rescale = false;

  auto* eig = app.add_subcommand("eig", "eigenvalues, flow exponents, cubic data");
  eig->add_option("file", file, "matrix JSON file")->required();

  auto* flow = app.add_subcommand("flow", "emit a trajectory as CSV");
  flow->add_option("file", file, "matrix JSON file")->required();
  flow->add_option("--method", method, "exact|numeric")
      ->check(CLI::IsMember({"exact", "numeric"}));
  flow->add_option("--generator", generator, "mielke|wegner")
      ->check(CLI::IsMember({"mielke", "wegner"}));
  flow->add_option("--s-max", s_max)->check(CLI::PositiveNumber);
  flow->add_option("--steps", steps)->check(CLI::PositiveNumber);
  flow->add_option("--samples", samples)->check(CLI::Range(2, 1000000));
  flow->add_option("--out", out_path, "CSV path (default stdout)");

  auto* cmp = app.add_subcommand("compare", "exact vs numeric deviation report");
  cmp->add_option("file", file, "matrix JSON file")->required();
  cmp->add_option("--generator", generator, "mielke|wegner")
      ->check(CLI::IsMember({"mielke", "wegner"}));
  cmp->add_option("--s-max", s_max)->check(CLI::PositiveNumber);
  cmp->add_option("--steps", steps)->check(CLI::PositiveNumber);
  cmp->add_option("--samples", samples)->check(CLI::Range(2, 1000000));
  cmp->add_option("--tolerance", tolerance)->check(CLI::PositiveNumber);

  auto* build = app.add_subcommand("tridiag-build", "matrix from chain parameters");
  build->add_option("--trace", trace)->required();
  build->add_option("--exponents", exps, "flow exponents u_i")->required()->delimiter(',');
  build->add_option("--coeffs", coeffs, "eta_1 coefficients p_i")->required()->delimiter(',');
  build->add_flag("--rescale", rescale, "project coefficients onto the product constraint");
  build->add_option("--out", out_path, "matrix JSON path (default stdout)");

  auto* verify = app.add_subcommand("verify4", "4x4 structural residual report");
  verify->add_option("file", file, "matrix JSON file")->required();
  auto* vs = verify->add_option("--s-max", s_max)->check(CLI::PositiveNumber);
  verify->add_option("--steps", steps)->check(CLI::PositiveNumber);
  verify->add_option("--samples", samples)->check(CLI::Range(8, 1000000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitInput;
  }

  try {
    if (eig->parsed()) return cmd_eig(file);
    if (flow->parsed()) return cmd_flow(file, method, generator, s_max, steps, samples, out_path);
    if (cmp->parsed()) return cmd_compare(file, generator, s_max, steps, samples, tolerance);
    if (build->parsed()) return cmd_tridiag_build(trace, exps, coeffs, rescale, out_path);
    if (verify->parsed()) return cmd_verify4(file, s_max, steps, samples, !vs->empty());
  } catch (const unsupported_exact_case& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
