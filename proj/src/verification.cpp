#include "ddflow/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ddflow {
namespace {

double observed_order(double e1, double e2, double t1, double t2) { return std::log(e1 / e2) / std::log(t1 / t2); }

void check_steps(const std::vector<double>& steps, const char* what) {
  if (steps.size() < 2) throw InvalidInput(std::string(what) + ": need at least two steps");
  for (std::size_t i = 0; i < steps.size(); ++i)
    if (!(steps[i] > 0.0) || (i > 0 && !(steps[i] < steps[i - 1])))
      throw InvalidInput(std::string(what) + ": steps must be positive and decreasing");
}

NewtonOptions tight_newton() {
  NewtonOptions o;
  o.tol = 1e-13;
  o.min_iterations = 1;
  return o;
}

}  // namespace

std::vector<Vector> random_directions(int size, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  std::vector<Vector> dirs;
  for (int k = 0; k < count; ++k) {
    Vector h(size);
    for (int i = 0; i < size; ++i) h[i] = sym(rng);
    dirs.push_back(std::move(h));
  }
  return dirs;
}

GradientCheck check_gradient(const FlowProblem& problem, const Vector& control, const std::vector<Vector>& directions,
                             const std::vector<double>& steps, double tol, double min_order) {
  check_steps(steps, "check_gradient");
  const StateSolution base = solve_state(problem, control, tight_newton());
  const Vector g = reduced_gradient(problem, control, StateLinearization(problem, base.state).solve_adjoint());
  const Vector guess = pack(problem, base.state);

  GradientCheck out;
  out.min_order = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < directions.size(); ++k) {
    const Vector& h = directions[k];
    const double analytic = control_inner(problem, g, h);
    double prev_err = 0.0;
    for (std::size_t s = 0; s < steps.size(); ++s) {
      const double t = steps[s];
      const StateSolution plus = solve_state(problem, control + t * h, tight_newton(), guess);
      const StateSolution minus = solve_state(problem, control - t * h, tight_newton(), guess);
      const double fd = cost_difference(problem, minus.state, control - t * h, plus.state, control + t * h) / (2 * t);
      GradientCheckRow row{static_cast<int>(k), t, fd, analytic, std::abs(fd - analytic) / std::abs(analytic)};
      const double err = std::abs(fd - analytic);
      if (s > 0) out.min_order = std::min(out.min_order, observed_order(prev_err, err, steps[s - 1], t));
      prev_err = err;
      if (s + 1 == steps.size()) out.max_rel_error = std::max(out.max_rel_error, row.rel_error);
      out.rows.push_back(row);
    }
  }
  out.passed = !directions.empty() && out.max_rel_error <= tol && out.min_order >= min_order;
  return out;
}

DualityCheck check_duality(const FlowProblem& problem, const StateFields& state, const std::vector<Vector>& directions,
                           double tol) {
  const StateLinearization lin(problem, state);
  const AdjointFields adj = lin.solve_adjoint();
  const Vector ru = problem.velocity_mass() * (state.u - problem.u_target());
  const Vector ry = problem.pair_mass() * (state.y - problem.y_target());
  const Vector phi_load = problem.control_coupling().transpose() * adj.phi;
  DualityCheck out;
  for (const Vector& h : directions) {
    const LinearizedFields lf = lin.solve_linearized(h);
    DualityRow row;
    row.lhs = lf.zeta.dot(ru) + lf.mu.dot(ry);
    row.rhs = h.dot(phi_load);
    row.rel_error = std::abs(row.lhs - row.rhs) / std::max(std::abs(row.rhs), std::numeric_limits<double>::min());
    out.max_rel_error = std::max(out.max_rel_error, row.rel_error);
    out.rows.push_back(row);
  }
  out.passed = !directions.empty() && out.max_rel_error <= tol;
  return out;
}

OrderCheck check_linearization_order(const FlowProblem& problem, const Vector& control, const Vector& h,
                                     const std::vector<double>& steps, double min_order) {
  check_steps(steps, "check_linearization_order");
  const StateSolution base = solve_state(problem, control, tight_newton());
  const LinearizedFields lf = solve_linearized(problem, base.state, h);
  const Vector guess = pack(problem, base.state);
  OrderCheck out;
  out.min_order = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const double t = steps[s];
    const StateSolution sol = solve_state(problem, control + t * h, tight_newton(), guess);
    const double e = h1_norm(problem, sol.state.u - base.state.u - t * lf.zeta) +
                     h1_norm(problem, sol.state.y - base.state.y - t * lf.mu);
    if (s > 0) out.min_order = std::min(out.min_order, observed_order(out.rows.back().error, e, steps[s - 1], t));
    out.rows.push_back({t, e});
  }
  out.passed = out.min_order >= min_order;
  return out;
}

StabilityCheck check_stability_ratio(const FlowProblem& problem, const Vector& control, const Vector& h,
                                     const std::vector<double>& scales, double max_spread) {
  if (scales.empty()) throw InvalidInput("check_stability_ratio: no scales");
  const StateSolution base = solve_state(problem, control, tight_newton());
  const Vector guess = pack(problem, base.state);
  StabilityCheck out;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double s : scales) {
    const Vector U2 = control + s * h;
    const StateSolution sol = solve_state(problem, U2, tight_newton(), guess);
    StabilityRow row;
    row.gap_l43 = control_norm(problem, U2 - control, 4.0 / 3.0);
    row.response = h1_norm(problem, sol.state.u - base.state.u) + h1_norm(problem, sol.state.y - base.state.y);
    row.ratio = row.response / row.gap_l43;
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
    out.rows.push_back(row);
  }
  out.spread = hi / lo;
  out.passed = lo > 0.0 && out.spread < max_spread;
  return out;
}

MmsStudy run_mms_study(const PhysicalModel& base, const ManufacturedSolution& exact, const std::vector<int>& levels,
                       const NewtonOptions& newton) {
  if (levels.size() < 2) throw InvalidInput("run_mms_study: need at least two mesh levels");
  const PhysicalModel model = exact.apply(base);
  MmsStudy study;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const FlowProblem problem(levels[i], model);
    const StateSolution sol = solve_state(problem, Vector::Zero(problem.num_controls()), newton);
    MmsRow row;
    row.n = levels[i];
    row.errors = compute_errors(problem, sol.state, exact);
    row.newton_iterations = sol.report.iterations;
    if (i > 0) {
      const MmsRow& p = study.rows.back();
      const double r = static_cast<double>(row.n) / p.n;
      auto ord = [r](double a, double b) { return std::log(a / b) / std::log(r); };
      row.orders = {ord(p.errors.u_l2, row.errors.u_l2), ord(p.errors.u_h1, row.errors.u_h1),
                    ord(p.errors.p_l2, row.errors.p_l2), ord(p.errors.y_h1, row.errors.y_h1)};
    }
    study.rows.push_back(row);
  }
  study.passed = true;
  for (std::size_t i = 1; i < study.rows.size(); ++i) {
    const DiscretizationErrors& o = study.rows[i].orders;
    study.passed = study.passed && o.u_l2 >= 2.7 && o.u_h1 >= 1.8 && o.p_l2 >= 1.8 && o.y_h1 >= 1.8;
  }
  return study;
}

}  // namespace ddflow
