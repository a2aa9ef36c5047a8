#pragma once

#include <Eigen/SparseLU>

#include <iosfwd>
#include <map>
#include <memory>
#include <string>

#include "ddflow/errors.hpp"
#include "ddflow/types.hpp"

namespace ddflow {

/// y = A x. Throws InvalidInput on a dimension mismatch.
Vector spmv(const SparseMatrix& A, const Eigen::Ref<const Vector>& x);

/// Builds a compressed matrix from (row, col, value) triplets; duplicates are
/// summed and column indices end up sorted within each row.
SparseMatrix from_triplets(int rows, int cols, const TripletList& triplets);

/// A square system A x = b together with Dirichlet-type dof constraints
/// x[i] = value.
struct LinearSystem {
  SparseMatrix matrix;
  Vector rhs;
  std::map<int, double> constrained_dofs;
};

/// Rewrites constrained rows as identity rows with rhs = prescribed value and
/// removes the constrained columns from the remaining rows (moving their
/// contribution into the rhs). The free block keeps its original structure,
/// so constraining A and A^T gives transposed matrices.
void apply_constraints(LinearSystem& system);

/// P A P + (I - P) for the free-dof projector P, i.e. apply_constraints with
/// homogeneous values and no rhs.
SparseMatrix constrain_homogeneous(const SparseMatrix& A, const std::vector<bool>& constrained);

/// Direct sparse LU (COLAMD ordering, partial pivoting). Factor once and reuse
/// for several right-hand sides.
class SparseDirectSolver {
 public:
  explicit SparseDirectSolver(const SparseMatrix& A);

  /// Solves and applies up to two steps of iterative refinement until
  /// ||A x - b|| / ||b|| <= tol. Throws SolverFailure with the achieved
  /// residual otherwise.
  Vector solve(const Eigen::Ref<const Vector>& b, double tol = 1e-10) const;
  /// Same for A^T x = b, reusing the factorization.
  Vector solve_transpose(const Eigen::Ref<const Vector>& b, double tol = 1e-10) const;

  int size() const { return static_cast<int>(matrix_.rows()); }

 private:
  Eigen::SparseMatrix<double, Eigen::ColMajor, int> matrix_;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor, int>>> lu_;
};

/// Applies the constraints (on a copy) and solves the system directly.
Vector solve(const LinearSystem& system, double tol = 1e-10);

/// Relative residual ||A x - b|| / ||b|| (absolute when b = 0).
double relative_residual(const SparseMatrix& A, const Vector& x, const Vector& b);

/// MatrixMarket coordinate (real general) dump, for debugging.
void write_matrix_market(std::ostream& out, const SparseMatrix& A);
void write_matrix_market(const std::string& path, const SparseMatrix& A);

}  // namespace ddflow
