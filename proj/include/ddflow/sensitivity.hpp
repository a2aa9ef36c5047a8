#pragma once

#include "ddflow/linalg.hpp"
#include "ddflow/state.hpp"

namespace ddflow {

/// Solution (zeta, mu) of the linearized state system for a control
/// direction h, with the discrete divergence multiplier.
struct LinearizedFields {
  Vector zeta;      ///< velocity direction, 2 n2
  Vector mu;        ///< scalar pair direction, 2 n2
  Vector pressure;  ///< n1
  double multiplier = 0.0;
};

/// Adjoint velocity phi, adjoint pressure xi and adjoint scalar pair eta.
struct AdjointFields {
  Vector phi;
  Vector xi;
  Vector eta;
  double multiplier = 0.0;
  double residual = 0.0;  ///< l2 residual of the constrained adjoint system
};

/// One factorization of the constrained Newton Jacobian at a state, shared by
/// linearized (J) and adjoint (J^T) solves. Read-only after construction.
class StateLinearization {
 public:
  StateLinearization(const FlowProblem& problem, const StateFields& state);

  const SparseMatrix& jacobian() const { return jacobian_; }

  /// Linearized response to the control direction h (2 * ncells values).
  LinearizedFields solve_linearized(const Vector& h) const;
  /// Adjoint with right-hand sides M(u - u_d) and M(y - y_d).
  AdjointFields solve_adjoint() const;
  /// Adjoint for arbitrary load vectors on the velocity and pair spaces.
  AdjointFields solve_adjoint(const Vector& load_u, const Vector& load_y) const;

 private:
  const FlowProblem* problem_;
  StateFields state_;
  SparseMatrix jacobian_;
  SparseDirectSolver solver_;
};

LinearizedFields solve_linearized(const FlowProblem& problem, const StateFields& state, const Vector& h);
AdjointFields solve_adjoint(const FlowProblem& problem, const StateFields& state);

/// Assembles the adjoint system directly from its bilinear forms (rows: test
/// functions v, q, mean, s; columns: phi, xi, mean multiplier, eta), without
/// going through the Newton Jacobian. Unconstrained.
SparseMatrix assemble_adjoint_operator(const FlowProblem& problem, const StateFields& state);

struct TransposeReport {
  double max_deviation = 0.0;  ///< max |A_adj - J^T| over free rows and columns
  double max_entry = 0.0;      ///< max |J| over free rows and columns
  int free_dofs = 0;
  int constrained_dofs = 0;
  bool passed = false;
};

/// Compares the independently assembled adjoint operator with the transpose
/// of the Newton Jacobian; passes if the deviation is at most tol * max_entry.
TransposeReport check_transpose_consistency(const FlowProblem& problem, const StateFields& state,
                                            double tol = 1e-12);

}  // namespace ddflow
