#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "ddflow/errors.hpp"
#include "ddflow/fe.hpp"
#include "ddflow/mesh.hpp"
#include "ddflow/model.hpp"
#include "ddflow/types.hpp"

namespace ddflow {

/// Offsets of the unknown blocks in the monolithic vector
/// [u_x, u_y, p, mean multiplier, T, S].
struct DofLayout {
  int n2 = 0;  ///< P2 dofs per component
  int n1 = 0;  ///< P1 pressure dofs

  int u() const { return 0; }
  int p() const { return 2 * n2; }
  int multiplier() const { return 2 * n2 + n1; }
  int y() const { return 2 * n2 + n1 + 1; }
  int size() const { return 4 * n2 + n1 + 1; }
};

/// Mesh, spaces, constant operators and model-dependent data of one discrete
/// problem. Copies share the (immutable) mesh.
class FlowProblem {
 public:
  FlowProblem(int n, PhysicalModel model);

  const TriMesh& mesh() const { return *mesh_; }
  const PhysicalModel& model() const { return model_; }
  const DofLayout& layout() const { return layout_; }

  const FESpace& velocity() const { return velocity_; }  ///< P2, 2 components
  const FESpace& scalar() const { return scalar_; }      ///< P2, 1 component
  const FESpace& pair() const { return pair_; }          ///< P2, (T, S)
  const FESpace& pressure() const { return pressure_; }  ///< P1
  const FESpace& control() const { return control_; }    ///< P0, 2 components

  int num_controls() const { return control_.dof_count(); }
  const Vector& cell_areas() const { return cell_areas_; }

  const SparseMatrix& velocity_mass() const { return velocity_mass_; }
  const SparseMatrix& pair_mass() const { return pair_mass_; }
  /// Componentwise P2 stiffness for two-component fields.
  const SparseMatrix& vector_stiffness() const { return stiffness_; }
  const SparseMatrix& divergence() const { return divergence_; }
  const Vector& pressure_mean() const { return pressure_mean_; }
  const SparseMatrix& control_coupling() const { return control_coupling_; }
  const SparseMatrix& scalar_diffusion() const { return ay_; }
  /// Discrete harmonic extension of the boundary data (pair space).
  const Vector& lifting() const { return lifting_; }
  const Vector& source_u() const { return source_u_; }
  const Vector& source_y() const { return source_y_; }

  /// Desired states as P2 coefficient vectors. Initialized by interpolating
  /// the model's u_d and y_d; may be overridden (e.g. by a computed state).
  const Vector& u_target() const { return u_target_; }
  const Vector& y_target() const { return y_target_; }
  void set_targets(const Vector& u_d, const Vector& y_d);

  /// True for every monolithic dof fixed by a Dirichlet condition (boundary
  /// velocity and scalar dofs).
  const std::vector<bool>& constrained() const { return constrained_; }

 private:
  std::shared_ptr<const TriMesh> mesh_;
  PhysicalModel model_;
  DofLayout layout_;
  FESpace velocity_, scalar_, pair_, pressure_, control_;
  Vector cell_areas_;
  SparseMatrix velocity_mass_, pair_mass_, stiffness_, divergence_, control_coupling_, ay_;
  Vector pressure_mean_, lifting_, source_u_, source_y_, u_target_, y_target_;
  std::vector<bool> constrained_;
};

/// Discrete (u, p, y = (T, S)); the pressure has zero mean.
struct StateFields {
  Vector u;  ///< 2 n2, component-blocked
  Vector p;  ///< n1
  Vector y;  ///< 2 n2, [T, S]
  double multiplier = 0.0;

  Vector T() const { return y.head(y.size() / 2); }
  Vector S() const { return y.tail(y.size() / 2); }
};

Vector pack(const FlowProblem& problem, const StateFields& state);
StateFields unpack(const FlowProblem& problem, const Vector& x);

/// Initial guess: zero flow, y equal to the lifting.
Vector initial_guess(const FlowProblem& problem);

/// Residual of the discrete state system at x for control values U
/// (2 * ncells, component-blocked). `load_scale` multiplies buoyancy, control
/// and sources (continuation parameter). With `constrained`, Dirichlet rows
/// are zeroed.
Vector state_residual(const FlowProblem& problem, const Vector& x, const Vector& control,
                      double load_scale = 1.0, bool constrained = true);

/// Exact Jacobian of state_residual. With `constrained`, Dirichlet rows and
/// columns are replaced by identity (P J P + I - P).
SparseMatrix newton_jacobian(const FlowProblem& problem, const Vector& x, double load_scale = 1.0,
                             bool constrained = true);

/// Frozen-coefficient operator of the fixed point iteration: viscosity and
/// transport fields taken from x, no derivative couplings.
SparseMatrix picard_operator(const FlowProblem& problem, const Vector& x);

struct NewtonOptions {
  double tol = 1e-10;  ///< absolute l2 norm of the constrained residual
  int max_iterations = 30;
  /// Newton steps taken even if the initial residual is already below tol;
  /// used for warm starts after tiny data changes.
  int min_iterations = 0;
  int max_halvings = 10;
  int picard_iterations = 5;
  double load_scale = 1.0;
};

struct NewtonReport {
  int iterations = 0;
  int picard_steps = 0;
  bool converged = false;
  std::vector<double> residual_history;        ///< total l2 residual per iterate
  std::vector<std::array<double, 3>> equation_history;  ///< momentum, continuity, transport
  std::vector<double> damping;                 ///< accepted step length per Newton step
};

class StateNonconvergence : public SolverFailure {
 public:
  StateNonconvergence(const std::string& what, NewtonReport report)
      : SolverFailure(what, report.residual_history.empty() ? 0.0 : report.residual_history.back()),
        report_(std::move(report)) {}
  const NewtonReport& report() const { return report_; }

 private:
  NewtonReport report_;
};

struct StateSolution {
  StateFields state;
  NewtonReport report;
};

/// Damped Newton on the state system; Picard fallback when the full Newton
/// step fails within the first two iterations. `guess` (monolithic, may be
/// empty) is used after re-imposing the boundary values.
StateSolution solve_state(const FlowProblem& problem, const Vector& control, const NewtonOptions& opts = {},
                          const Vector& guess = Vector());

class ContinuationFailure : public SolverFailure {
 public:
  ContinuationFailure(const std::string& what, double residual, double last_good_stage, StateFields last_good)
      : SolverFailure(what, residual), stage_(last_good_stage), last_good_(std::move(last_good)) {}
  double last_good_stage() const { return stage_; }
  const StateFields& last_good() const { return last_good_; }

 private:
  double stage_;
  StateFields last_good_;
};

/// Solves along an increasing load ramp ending at 1, warm-starting each stage.
StateSolution continuation_solve(const FlowProblem& problem, const Vector& control, const std::vector<double>& ramp,
                                 const NewtonOptions& opts = {});

/// ||u||_1, ||y||_1 and a computable surrogate of the higher-regularity bound:
/// ||u||_1 + ||y||_1 + broken H^2 seminorm of (u, y).
StateNorms state_norms(const FlowProblem& problem, const StateFields& state);

/// H^1 norm of a two-component P2 field (component-blocked).
double h1_norm(const FlowProblem& problem, const Vector& field);
/// L^2 norm of a two-component P2 field.
double l2_norm(const FlowProblem& problem, const Vector& field);

/// Smooth exact solution with matching sources, for convergence studies.
struct ManufacturedSolution {
  double amplitude = 50.0;   ///< stream function scale
  double pressure = 1.0;
  double bump_T = 0.5;
  double slope_S = 1.0;
  double bump_S = 0.5;

  Vec2 u(const Vec2& x) const;
  Mat2 grad_u(const Vec2& x) const;  ///< (k, l) = d u_k / d x_l
  Vec2 laplace_u(const Vec2& x) const;
  double p(const Vec2& x) const;
  Vec2 grad_p(const Vec2& x) const;
  Vec2 y(const Vec2& x) const;
  Mat2 grad_y(const Vec2& x) const;
  Vec2 laplace_y(const Vec2& x) const;

  /// Strong-form sources for a given model (constant K^{-1}, D).
  Vec2 f_u(const PhysicalModel& model, const Vec2& x) const;
  Vec2 f_y(const PhysicalModel& model, const Vec2& x) const;

  /// Copy of `model` with the boundary data and sources of this solution.
  PhysicalModel apply(PhysicalModel model) const;
};

struct DiscretizationErrors {
  double u_l2 = 0.0;
  double u_h1 = 0.0;  ///< full H^1 norm of the error
  double p_l2 = 0.0;
  double y_h1 = 0.0;
};

DiscretizationErrors compute_errors(const FlowProblem& problem, const StateFields& state,
                                    const ManufacturedSolution& exact);

}  // namespace ddflow
