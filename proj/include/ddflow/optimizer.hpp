#pragma once

#include <string>
#include <vector>

#include "ddflow/sensitivity.hpp"
#include "ddflow/state.hpp"

namespace ddflow {

/// Piecewise-constant control with box bounds. All three vectors hold
/// 2 * ncells values, component-blocked like the P0 control space.
struct ControlField {
  Vector values;
  Vector lower;
  Vector upper;

  static ControlField uniform(int size, double value, double lower, double upper);
  int size() const { return static_cast<int>(values.size()); }
  /// Throws InvalidInput on mismatched sizes or lower > upper.
  void validate() const;
};

/// Componentwise max(lower, min(upper, v)).
Vector clamp(const Vector& v, const Vector& lower, const Vector& upper);
ControlField project(const ControlField& U);

/// Area-weighted inner product of two control-shaped vectors.
double control_inner(const FlowProblem& problem, const Vector& a, const Vector& b);
/// L^p norm (p >= 1) of a piecewise-constant vector field, using the
/// Euclidean length of the two components on every cell.
double control_norm(const FlowProblem& problem, const Vector& v, double p);

/// Cell averages of a two-component P2 field, in control layout.
Vector cell_average(const FlowProblem& problem, const Vector& field);

struct CostTerms {
  double tracking_u = 0.0;  ///< 1/2 ||u - u_d||^2
  double tracking_y = 0.0;  ///< 1/2 ||y - y_d||^2
  double regularization = 0.0;
  double total() const { return tracking_u + tracking_y + regularization; }
};

CostTerms cost_terms(const FlowProblem& problem, const StateFields& state, const Vector& control);
/// j(b) - j(a) evaluated from the field differences (no cancellation).
double cost_difference(const FlowProblem& problem, const StateFields& a, const Vector& Ua, const StateFields& b,
                       const Vector& Ub);

/// Solves the state at U and returns the discrete cost.
double reduced_cost(const FlowProblem& problem, const Vector& control, const NewtonOptions& newton = {});

/// Riesz representative of the derivative of j in the control inner product:
/// lambda U + cell averages of phi.
Vector reduced_gradient(const FlowProblem& problem, const Vector& control, const AdjointFields& adjoint);

/// || U - P(-phi / lambda) ||_0 with cell-averaged phi.
double vi_residual(const FlowProblem& problem, const ControlField& U, const AdjointFields& adjoint);
/// Cellwise |U - P(-phi / lambda)| (max over components) for pointwise checks.
Vector vi_residual_cellwise(const FlowProblem& problem, const ControlField& U, const AdjointFields& adjoint);

struct OptimizeOptions {
  double kkt_tol = 1e-6;
  int max_iterations = 200;
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  double min_step = 1e-14;
  /// Use the Barzilai-Borwein step (capped at 1/lambda) as the first trial
  /// after the first iteration; otherwise every line search starts at 1/lambda.
  bool barzilai_borwein = true;
  NewtonOptions newton{1e-12};
};

struct IterationRecord {
  int iteration = 0;
  double cost = 0.0;
  double projected_gradient = 0.0;  ///< ||U - P(U - grad)||_0
  double vi_residual = 0.0;
  double step = 0.0;                ///< accepted step length (0 on the last record)
  int newton_iterations = 0;        ///< state Newton iterations spent in the line search
  double change_l2 = 0.0;           ///< ||U_{k+1} - U_k||_0
  double change_l43 = 0.0;          ///< ||U_{k+1} - U_k||_{4/3}
  bool interpolation_holds = true;  ///< ||U||_{4/3}^2 <= ||U||_1 ||U||_2
};

enum class Termination { Converged, MaxIterations };

struct OptimizationReport {
  std::vector<IterationRecord> history;
  Termination termination = Termination::MaxIterations;
  std::string reason() const;
};

class OptimizationStagnation : public Error {
 public:
  OptimizationStagnation(const std::string& what, OptimizationReport report)
      : Error(what), report_(std::move(report)) {}
  const OptimizationReport& report() const { return report_; }

 private:
  OptimizationReport report_;
};

struct OptimizationResult {
  ControlField control;
  StateFields state;
  AdjointFields adjoint;
  OptimizationReport report;
};

/// Projected gradient with Armijo backtracking along the projection arc.
OptimizationResult optimize(const FlowProblem& problem, const ControlField& U0, const OptimizeOptions& opts = {});

}  // namespace ddflow
