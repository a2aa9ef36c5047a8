#include "ddflow/optimizer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ddflow {
namespace {

void check_control(const FlowProblem& problem, const Vector& v, const char* what) {
  if (v.size() != problem.num_controls()) {
    std::ostringstream msg;
    msg << what << ": control has " << v.size() << " values, expected " << problem.num_controls();
    throw InvalidInput(msg.str());
  }
}

}  // namespace

ControlField ControlField::uniform(int size, double value, double lower, double upper) {
  ControlField U{Vector::Constant(size, value), Vector::Constant(size, lower), Vector::Constant(size, upper)};
  U.validate();
  return U;
}

void ControlField::validate() const {
  if (lower.size() != values.size() || upper.size() != values.size())
    throw InvalidInput("ControlField: values and bounds differ in size");
  for (int i = 0; i < values.size(); ++i)
    if (!(lower[i] <= upper[i])) throw InvalidInput("ControlField: lower bound exceeds upper bound");
}

Vector clamp(const Vector& v, const Vector& lower, const Vector& upper) {
  if (lower.size() != v.size() || upper.size() != v.size()) throw InvalidInput("clamp: size mismatch");
  return v.cwiseMin(upper).cwiseMax(lower);
}

ControlField project(const ControlField& U) {
  U.validate();
  return {clamp(U.values, U.lower, U.upper), U.lower, U.upper};
}

double control_inner(const FlowProblem& problem, const Vector& a, const Vector& b) {
  check_control(problem, a, "control_inner");
  check_control(problem, b, "control_inner");
  const int nc = problem.control().scalar_dofs;
  const Vector& area = problem.cell_areas();
  double s = 0.0;
  for (int c = 0; c < nc; ++c) s += area[c] * (a[c] * b[c] + a[nc + c] * b[nc + c]);
  return s;
}

double control_norm(const FlowProblem& problem, const Vector& v, double p) {
  check_control(problem, v, "control_norm");
  if (!(p >= 1.0)) throw InvalidInput("control_norm: p must be at least 1");
  const int nc = problem.control().scalar_dofs;
  const Vector& area = problem.cell_areas();
  double s = 0.0;
  for (int c = 0; c < nc; ++c) s += area[c] * std::pow(std::hypot(v[c], v[nc + c]), p);
  return std::pow(s, 1.0 / p);
}

Vector cell_average(const FlowProblem& problem, const Vector& field) {
  if (field.size() != problem.velocity().dof_count()) throw InvalidInput("cell_average: field size mismatch");
  Vector avg = problem.control_coupling().transpose() * field;
  const int nc = problem.control().scalar_dofs;
  for (int c = 0; c < nc; ++c) {
    avg[c] /= problem.cell_areas()[c];
    avg[nc + c] /= problem.cell_areas()[c];
  }
  return avg;
}

CostTerms cost_terms(const FlowProblem& problem, const StateFields& state, const Vector& control) {
  check_control(problem, control, "cost_terms");
  const Vector eu = state.u - problem.u_target();
  const Vector ey = state.y - problem.y_target();
  CostTerms c;
  c.tracking_u = 0.5 * eu.dot(problem.velocity_mass() * eu);
  c.tracking_y = 0.5 * ey.dot(problem.pair_mass() * ey);
  c.regularization = 0.5 * problem.model().lambda * control_inner(problem, control, control);
  return c;
}

double cost_difference(const FlowProblem& problem, const StateFields& a, const Vector& Ua, const StateFields& b,
                       const Vector& Ub) {
  const Vector du = b.u - a.u, dy = b.y - a.y;
  const Vector su = b.u + a.u - 2.0 * problem.u_target();
  const Vector sy = b.y + a.y - 2.0 * problem.y_target();
  return 0.5 * du.dot(problem.velocity_mass() * su) + 0.5 * dy.dot(problem.pair_mass() * sy) +
         0.5 * problem.model().lambda * control_inner(problem, Ub - Ua, Ub + Ua);
}

double reduced_cost(const FlowProblem& problem, const Vector& control, const NewtonOptions& newton) {
  const StateSolution sol = solve_state(problem, control, newton);
  return cost_terms(problem, sol.state, control).total();
}

Vector reduced_gradient(const FlowProblem& problem, const Vector& control, const AdjointFields& adjoint) {
  check_control(problem, control, "reduced_gradient");
  return problem.model().lambda * control + cell_average(problem, adjoint.phi);
}

Vector vi_residual_cellwise(const FlowProblem& problem, const ControlField& U, const AdjointFields& adjoint) {
  check_control(problem, U.values, "vi_residual");
  const double lambda = problem.model().lambda;
  if (!(lambda > 0.0)) throw InvalidInput("vi_residual: lambda must be positive");
  const Vector target = clamp(-cell_average(problem, adjoint.phi) / lambda, U.lower, U.upper);
  const Vector d = (U.values - target).cwiseAbs();
  const int nc = problem.control().scalar_dofs;
  return d.head(nc).cwiseMax(d.tail(nc));
}

double vi_residual(const FlowProblem& problem, const ControlField& U, const AdjointFields& adjoint) {
  const double lambda = problem.model().lambda;
  if (!(lambda > 0.0)) throw InvalidInput("vi_residual: lambda must be positive");
  const Vector target = clamp(-cell_average(problem, adjoint.phi) / lambda, U.lower, U.upper);
  return control_norm(problem, U.values - target, 2.0);
}

std::string OptimizationReport::reason() const {
  switch (termination) {
    case Termination::Converged:
      return "converged (vi residual below tolerance)";
    case Termination::MaxIterations:
      return "iteration limit reached";
  }
  return "";
}

OptimizationResult optimize(const FlowProblem& problem, const ControlField& U0, const OptimizeOptions& opts) {
  const double lambda = problem.model().lambda;
  if (!(lambda > 0.0)) throw InvalidInput("optimize: lambda must be positive");
  if (!(opts.kkt_tol > 0.0) || !(opts.backtrack > 0.0 && opts.backtrack < 1.0) || opts.max_iterations < 0)
    throw InvalidInput("optimize: invalid options");
  check_control(problem, U0.values, "optimize");

  ControlField U = project(U0);
  StateSolution sol = solve_state(problem, U.values, opts.newton);
  AdjointFields adj = StateLinearization(problem, sol.state).solve_adjoint();
  Vector g = reduced_gradient(problem, U.values, adj);
  double j = cost_terms(problem, sol.state, U.values).total();
  int newton_its = sol.report.iterations;

  OptimizationReport report;
  double step = 1.0 / lambda;
  for (int k = 0;; ++k) {
    IterationRecord rec;
    rec.iteration = k;
    rec.cost = j;
    rec.vi_residual = vi_residual(problem, U, adj);
    rec.projected_gradient = control_norm(problem, U.values - clamp(U.values - g, U.lower, U.upper), 2.0);
    rec.newton_iterations = newton_its;
    const double n43 = control_norm(problem, U.values, 4.0 / 3.0);
    rec.interpolation_holds =
        n43 * n43 <= control_norm(problem, U.values, 1.0) * control_norm(problem, U.values, 2.0) * (1 + 1e-12);
    if (rec.vi_residual <= opts.kkt_tol) {
      report.termination = Termination::Converged;
      report.history.push_back(rec);
      break;
    }
    if (k >= opts.max_iterations) {
      report.termination = Termination::MaxIterations;
      report.history.push_back(rec);
      break;
    }

    // Armijo backtracking along the projection arc
    double t = std::min(step, 1.0 / lambda);
    newton_its = 0;
    ControlField trial = U;
    StateSolution trial_sol;
    for (;;) {
      trial.values = clamp(U.values - t * g, U.lower, U.upper);
      const Vector d = trial.values - U.values;
      NewtonOptions newton = opts.newton;
      newton.min_iterations = std::max(newton.min_iterations, 1);
      trial_sol = solve_state(problem, trial.values, newton, pack(problem, sol.state));
      newton_its += trial_sol.report.iterations;
      const double decrease = cost_difference(problem, sol.state, U.values, trial_sol.state, trial.values);
      // near the optimum the decrease drops below the round-off of j
      const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(j);
      if (decrease <= opts.armijo_c1 * control_inner(problem, g, d) + noise && control_inner(problem, g, d) < 0.0)
        break;
      t *= opts.backtrack;
      if (t < opts.min_step) {
        report.history.push_back(rec);
        std::ostringstream msg;
        msg << "line search stagnated at iteration " << k << " (vi residual " << rec.vi_residual << ")";
        throw OptimizationStagnation(msg.str(), report);
      }
    }
    const Vector s = trial.values - U.values;
    rec.step = t;
    rec.change_l2 = control_norm(problem, s, 2.0);
    rec.change_l43 = control_norm(problem, s, 4.0 / 3.0);
    report.history.push_back(rec);

    U = trial;
    sol = std::move(trial_sol);
    adj = StateLinearization(problem, sol.state).solve_adjoint();
    const Vector g_new = reduced_gradient(problem, U.values, adj);
    j = cost_terms(problem, sol.state, U.values).total();
    const double sy = control_inner(problem, s, g_new - g);
    step = (opts.barzilai_borwein && sy > 0.0) ? control_inner(problem, s, s) / sy : 1.0 / lambda;
    g = g_new;
  }
  return {U, sol.state, adj, report};
}

}  // namespace ddflow
