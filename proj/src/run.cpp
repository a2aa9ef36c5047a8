#include "ddflow/run.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ddflow/io.hpp"
#include "ddflow/ssc.hpp"
#include "ddflow/verification.hpp"

namespace ddflow {
namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
}

void write_csv_file(const fs::path& path, const std::function<void(std::ostream&)>& f) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  f(out);
}

std::ostringstream report_header(const std::string& command, const RunConfig& c) {
  std::ostringstream r;
  r << std::setprecision(10);
  r << "command: " << command << "\nmesh n: " << c.n << "\nlambda: " << c.model.lambda << "\nseed: " << c.seed
    << '\n';
  return r;
}

CsvTable newton_table(const NewtonReport& rep) {
  CsvTable t({"iteration", "residual", "momentum", "continuity", "transport", "damping"});
  for (std::size_t i = 0; i < rep.residual_history.size(); ++i) {
    const auto& e = rep.equation_history[i];
    const double damping = i > 0 && i - 1 < rep.damping.size() ? rep.damping[i - 1] : 0.0;
    t.add_row({double(i), rep.residual_history[i], e[0], e[1], e[2], damping});
  }
  return t;
}

CsvTable optimizer_table(const OptimizationReport& rep) {
  CsvTable t({"iteration", "cost", "projected_gradient", "vi_residual", "step", "newton_iterations", "change_l2",
              "change_l43", "interpolation_holds"});
  for (const auto& r : rep.history)
    t.add_row({double(r.iteration), r.cost, r.projected_gradient, r.vi_residual, r.step, double(r.newton_iterations),
               r.change_l2, r.change_l43, r.interpolation_holds ? 1.0 : 0.0});
  return t;
}

// Seeded admissible base control and perturbation directions for the checks.
Vector check_control(const FlowProblem& problem, const RunConfig& c) {
  const Vector U = c.control_scale * random_directions(problem.num_controls(), 1, c.seed)[0];
  return clamp(U, Vector::Constant(U.size(), c.lower), Vector::Constant(U.size(), c.upper));
}

std::vector<Vector> check_directions(const FlowProblem& problem, const RunConfig& c) {
  auto dirs = random_directions(problem.num_controls(), c.check_directions, c.seed + 1);
  for (auto& h : dirs) h *= c.direction_scale;
  return dirs;
}

int solve_state_command(const RunConfig& c, const fs::path& out, std::ostream& log) {
  const FlowProblem problem = build_problem(c);
  const Vector U = initial_control(problem, c).values;
  StateSolution sol;
  try {
    sol = solve_state(problem, U, newton_options(c));
  } catch (const StateNonconvergence& e) {
    newton_table(e.report()).write(out / "history.csv");
    throw;
  }
  newton_table(sol.report).write(out / "history.csv");
  write_state_vtk(out / "fields_state.vtk", problem, sol.state);
  write_csv_file(out / "state.csv", [&](std::ostream& o) { write_state_csv(o, problem, sol.state); });

  const StateNorms norms = state_norms(problem, sol.state);
  auto r = report_header("solve-state", c);
  r << "newton iterations: " << sol.report.iterations << "\npicard steps: " << sol.report.picard_steps
    << "\nfinal residual: " << sol.report.residual_history.back() << "\n||u||_1: " << norms.Mu
    << "\n||y||_1: " << norms.My << "\n\n"
    << check_smallness(problem.model(), norms, c.constants).text();
  write_text(out / "report.txt", r.str());
  log << "solve-state: converged in " << sol.report.iterations << " Newton iterations, residual "
      << sol.report.residual_history.back() << '\n';
  return 0;
}

int optimize_command(const RunConfig& c, const fs::path& out, std::ostream& log) {
  const FlowProblem problem = build_problem(c);
  auto r = report_header("optimize", c);
  OptimizationResult res;
  try {
    res = optimize(problem, initial_control(problem, c), optimize_options(c));
  } catch (const OptimizationStagnation& e) {
    optimizer_table(e.report()).write(out / "history.csv");
    r << "termination: " << e.what() << '\n';
    write_text(out / "report.txt", r.str());
    log << "optimize: " << e.what() << '\n';
    return 1;
  }
  optimizer_table(res.report).write(out / "history.csv");
  const Vector cellwise = vi_residual_cellwise(problem, res.control, res.adjoint);
  const int nc = problem.mesh().num_cells();
  Vector vi_cells = cellwise.head(nc);
  write_state_vtk(out / "fields_state.vtk", problem, res.state);
  write_adjoint_vtk(out / "fields_adjoint.vtk", problem, res.adjoint);
  write_control_vtk(out / "fields_control.vtk", problem, res.control.values, {{"vi_residual", vi_cells}});
  write_csv_file(out / "control.csv", [&](std::ostream& o) { write_control_csv(o, problem, res.control.values); });
  write_csv_file(out / "state.csv", [&](std::ostream& o) { write_state_csv(o, problem, res.state); });

  const CostTerms cost = cost_terms(problem, res.state, res.control.values);
  const auto& last = res.report.history.back();
  r << "termination: " << res.report.reason() << "\niterations: " << last.iteration << "\ncost: " << cost.total()
    << "\n  tracking u: " << cost.tracking_u << "\n  tracking y: " << cost.tracking_y
    << "\n  regularization: " << cost.regularization << "\nvi residual: " << last.vi_residual
    << "\nmax cellwise vi residual: " << cellwise.maxCoeff() << '\n';
  if (c.desired == "inverse-crime") {
    const Vector ustar = build_ustar(problem, c);
    r << "||U - U*||_0: " << control_norm(problem, res.control.values - ustar, 2.0)
      << "\n||U*||_0: " << control_norm(problem, ustar, 2.0) << '\n';
  }
  write_text(out / "report.txt", r.str());
  log << "optimize: " << res.report.reason() << " after " << last.iteration << " iterations, vi residual "
      << last.vi_residual << '\n';
  return res.report.termination == Termination::Converged ? 0 : 1;
}

int check_gradient_command(const RunConfig& c, const fs::path& out, std::ostream& log) {
  const FlowProblem problem = build_problem(c);
  const GradientCheck g = check_gradient(problem, check_control(problem, c), check_directions(problem, c), c.fd_steps);
  CsvTable t({"direction", "t", "finite_difference", "analytic", "rel_error"});
  for (const auto& row : g.rows) t.add_row({double(row.direction), row.t, row.finite_difference, row.analytic, row.rel_error});
  t.write(out / "history.csv");
  auto r = report_header("check-gradient", c);
  r << "max relative error at t = " << c.fd_steps.back() << ": " << g.max_rel_error
    << " (limit 1e-5)\nmin observed order: " << g.min_order << " (limit 1.9)\nresult: " << (g.passed ? "PASS" : "FAIL")
    << '\n';
  write_text(out / "report.txt", r.str());
  log << "check-gradient: max relative FD error " << g.max_rel_error << ", min order " << g.min_order << ": "
      << (g.passed ? "PASS" : "FAIL") << '\n';
  return g.passed ? 0 : 1;
}

int check_adjoint_command(const RunConfig& c, const fs::path& out, std::ostream& log) {
  const FlowProblem problem = build_problem(c);
  const StateSolution sol = solve_state(problem, check_control(problem, c), newton_options(c));
  const TransposeReport tr = check_transpose_consistency(problem, sol.state);
  const DualityCheck d = check_duality(problem, sol.state, check_directions(problem, c));
  CsvTable t({"direction", "lhs", "rhs", "rel_error"});
  for (std::size_t i = 0; i < d.rows.size(); ++i) t.add_row({double(i), d.rows[i].lhs, d.rows[i].rhs, d.rows[i].rel_error});
  t.write(out / "history.csv");
  write_state_vtk(out / "fields_state.vtk", problem, sol.state);
  auto r = report_header("check-adjoint", c);
  r << "transpose deviation: " << tr.max_deviation << " (max entry " << tr.max_entry << ", " << tr.free_dofs
    << " free dofs): " << (tr.passed ? "PASS" : "FAIL") << "\nduality max relative error: " << d.max_rel_error
    << ": " << (d.passed ? "PASS" : "FAIL") << '\n';
  write_text(out / "report.txt", r.str());
  const bool ok = tr.passed && d.passed;
  log << "check-adjoint: transpose deviation " << tr.max_deviation << ", duality error " << d.max_rel_error << ": "
      << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? 0 : 1;
}

int check_ssc_command(const RunConfig& c, const fs::path& out, std::ostream& log) {
  const FlowProblem problem = build_problem(c);
  const double lambda = problem.model().lambda;
  const OptimizationResult kkt = optimize(problem, initial_control(problem, c), optimize_options(c));
  optimizer_table(kkt.report).write(out / "history.csv");
  const double eps = c.epsilon > 0.0 ? c.epsilon : default_epsilon(problem, kkt.control.values, kkt.adjoint, lambda);
  const CurvatureProbe probe = ssc_curvature_probe(problem, kkt, eps, c.probe_directions, c.seed);
  const GrowthReport growth =
      quadratic_growth_check(problem, kkt, c.growth_radius, c.growth_samples, c.seed + 1, newton_options(c));
  const ThresholdReport threshold =
      lambda_threshold(problem.model(), lambda, estimate_threshold_bounds(problem, kkt, probe), c.constants);

  CsvTable pt({"direction", "l_ww", "h43_squared", "sigma"});
  for (const auto& p : probe.results) pt.add_row({double(p.direction), p.l_ww, p.h43_squared, p.sigma});
  pt.write(out / "probes.csv");
  CsvTable gt({"sample", "distance_l2", "distance_l43", "increase", "theta"});
  for (std::size_t i = 0; i < growth.samples.size(); ++i) {
    const auto& s = growth.samples[i];
    gt.add_row({double(i), s.distance_l2, s.distance_l43, s.increase, s.theta});
  }
  gt.write(out / "growth.csv");

  const ActiveSetMask mask = strongly_active_set(problem, kkt.control.values, kkt.adjoint, lambda, eps);
  const int nc = problem.mesh().num_cells();
  Vector ax(nc), ay(nc);
  for (int i = 0; i < nc; ++i) {
    ax[i] = mask.mask[i] ? 1.0 : 0.0;
    ay[i] = mask.mask[nc + i] ? 1.0 : 0.0;
  }
  write_control_vtk(out / "fields_active.vtk", problem, kkt.control.values, {{"active_x", ax}, {"active_y", ay}});
  write_state_vtk(out / "fields_state.vtk", problem, kkt.state);

  auto r = report_header("check-ssc", c);
  r << "optimizer: " << kkt.report.reason() << ", vi residual " << kkt.report.history.back().vi_residual
    << "\nepsilon: " << eps << "\nstrongly active components: " << probe.active_count << " of "
    << kkt.control.size() << "\ncurvature probe: " << probe.verdict() << "\nquadratic growth: theta_est = "
    << growth.theta_est << " over " << growth.samples.size() << " samples (" << growth.excluded
    << " excluded), radius " << growth.radius << ": " << (growth.passed ? "PASS" : "FAIL") << "\n\n"
    << threshold.text() << '\n'
    << check_smallness(problem.model(), state_norms(problem, kkt.state), c.constants).text();
  write_text(out / "report.txt", r.str());
  log << "check-ssc: " << probe.verdict() << "; growth theta_est " << growth.theta_est << '\n';
  const bool ok = (probe.degenerate || probe.min_sigma > 0.0) && growth.passed;
  return ok ? 0 : 1;
}

int mms_command(const RunConfig& c, const fs::path& out, std::ostream& log) {
  const PhysicalModel base = default_boussinesq_model(c.model);
  const MmsStudy study = run_mms_study(base, ManufacturedSolution{}, c.mms_levels, newton_options(c));
  CsvTable t({"n", "u_l2", "u_h1", "p_l2", "y_h1", "order_u_l2", "order_u_h1", "order_p_l2", "order_y_h1",
              "newton_iterations"});
  for (const auto& row : study.rows) {
    const auto& e = row.errors;
    const auto& o = row.orders;
    t.add_row({double(row.n), e.u_l2, e.u_h1, e.p_l2, e.y_h1, o.u_l2, o.u_h1, o.p_l2, o.y_h1,
               double(row.newton_iterations)});
  }
  t.write(out / "history.csv");
  auto r = report_header("mms-convergence", c);
  for (const auto& row : study.rows)
    r << "n = " << row.n << ": orders u_l2 " << row.orders.u_l2 << ", u_h1 " << row.orders.u_h1 << ", p_l2 "
      << row.orders.p_l2 << ", y_h1 " << row.orders.y_h1 << '\n';
  r << "result: " << (study.passed ? "PASS" : "FAIL") << '\n';
  write_text(out / "report.txt", r.str());
  log << "mms-convergence: " << (study.passed ? "PASS" : "FAIL") << '\n';
  return study.passed ? 0 : 1;
}

}  // namespace

std::vector<std::string> command_names() {
  return {"solve-state", "optimize", "check-gradient", "check-adjoint", "check-ssc", "mms-convergence"};
}

int run_command(const std::string& command, const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  const auto names = command_names();
  if (std::find(names.begin(), names.end(), command) == names.end())
    throw InvalidInput("unknown command '" + command + "'");
  config.validate();
  fs::create_directories(out_dir);
  if (command == "solve-state") return solve_state_command(config, out_dir, log);
  if (command == "optimize") return optimize_command(config, out_dir, log);
  if (command == "check-gradient") return check_gradient_command(config, out_dir, log);
  if (command == "check-adjoint") return check_adjoint_command(config, out_dir, log);
  if (command == "check-ssc") return check_ssc_command(config, out_dir, log);
  return mms_command(config, out_dir, log);
}

}  // namespace ddflow
