#include "ddflow/linalg.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace ddflow {

Vector spmv(const SparseMatrix& A, const Eigen::Ref<const Vector>& x) {
  if (x.size() != A.cols()) {
    std::ostringstream msg;
    msg << "spmv: vector of length " << x.size() << " against matrix with " << A.cols()
        << " columns";
    throw InvalidInput(msg.str());
  }
  Vector y = Vector::Zero(A.rows());
  for (int i = 0; i < A.outerSize(); ++i) {
    double sum = 0.0;
    for (SparseMatrix::InnerIterator it(A, i); it; ++it) sum += it.value() * x[it.col()];
    y[i] = sum;
  }
  return y;
}

SparseMatrix from_triplets(int rows, int cols, const TripletList& triplets) {
  SparseMatrix A(rows, cols);
  A.setFromTriplets(triplets.begin(), triplets.end());
  A.makeCompressed();
  return A;
}

void apply_constraints(LinearSystem& system) {
  SparseMatrix& A = system.matrix;
  if (A.rows() != A.cols() || system.rhs.size() != A.rows())
    throw InvalidInput("apply_constraints: system must be square with matching rhs");
  const int n = static_cast<int>(A.rows());
  std::vector<bool> fixed(n, false);
  Vector values = Vector::Zero(n);
  for (const auto& [dof, value] : system.constrained_dofs) {
    if (dof < 0 || dof >= n) throw InvalidInput("apply_constraints: dof out of range");
    fixed[dof] = true;
    values[dof] = value;
  }

  TripletList kept;
  kept.reserve(static_cast<std::size_t>(A.nonZeros()));
  for (int i = 0; i < n; ++i) {
    if (fixed[i]) continue;
    for (SparseMatrix::InnerIterator it(A, i); it; ++it) {
      if (fixed[it.col()])
        system.rhs[i] -= it.value() * values[it.col()];
      else
        kept.emplace_back(i, static_cast<int>(it.col()), it.value());
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!fixed[i]) continue;
    kept.emplace_back(i, i, 1.0);
    system.rhs[i] = values[i];
  }
  A = from_triplets(n, n, kept);
}

SparseMatrix constrain_homogeneous(const SparseMatrix& A, const std::vector<bool>& constrained) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || static_cast<int>(constrained.size()) != n)
    throw InvalidInput("constrain_homogeneous: size mismatch");
  TripletList kept;
  kept.reserve(static_cast<std::size_t>(A.nonZeros()));
  for (int i = 0; i < n; ++i) {
    if (constrained[i]) {
      kept.emplace_back(i, i, 1.0);
      continue;
    }
    for (SparseMatrix::InnerIterator it(A, i); it; ++it)
      if (!constrained[it.col()]) kept.emplace_back(i, static_cast<int>(it.col()), it.value());
  }
  return from_triplets(n, n, kept);
}

SparseDirectSolver::SparseDirectSolver(const SparseMatrix& A) : matrix_(A) {
  if (A.rows() != A.cols()) throw InvalidInput("SparseDirectSolver: matrix must be square");
  matrix_.makeCompressed();
  lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor, int>>>();
  lu_->analyzePattern(matrix_);
  lu_->factorize(matrix_);
  if (lu_->info() != Eigen::Success)
    throw SolverFailure("sparse LU factorization failed: " + lu_->lastErrorMessage(),
                        std::numeric_limits<double>::infinity());
}

namespace {

template <class Apply, class Inverse>
Vector refined_solve(const Eigen::Ref<const Vector>& b, double tol, Apply apply, Inverse inverse) {
  const double bnorm = b.norm();
  if (bnorm == 0.0) return Vector::Zero(b.size());
  Vector x = inverse(b);
  Vector r = b - apply(x);
  double rel = r.norm() / bnorm;
  for (int step = 0; step < 2 && rel > tol && std::isfinite(rel); ++step) {
    x += inverse(r);
    r = b - apply(x);
    rel = r.norm() / bnorm;
  }
  if (!(rel <= tol)) {
    std::ostringstream msg;
    msg << "linear solve did not reach relative residual " << tol << " (achieved " << rel << ")";
    throw SolverFailure(msg.str(), rel);
  }
  return x;
}

}  // namespace

Vector SparseDirectSolver::solve(const Eigen::Ref<const Vector>& b, double tol) const {
  if (b.size() != matrix_.rows()) throw InvalidInput("SparseDirectSolver::solve: rhs size mismatch");
  return refined_solve(
      b, tol, [&](const Vector& x) -> Vector { return matrix_ * x; },
      [&](const Vector& r) -> Vector { return lu_->solve(r); });
}

Vector SparseDirectSolver::solve_transpose(const Eigen::Ref<const Vector>& b, double tol) const {
  if (b.size() != matrix_.rows()) throw InvalidInput("SparseDirectSolver::solve_transpose: rhs size mismatch");
  return refined_solve(
      b, tol, [&](const Vector& x) -> Vector { return matrix_.transpose() * x; },
      [&](const Vector& r) -> Vector { return lu_->transpose().solve(r); });
}

Vector solve(const LinearSystem& system, double tol) {
  LinearSystem constrained = system;
  apply_constraints(constrained);
  return SparseDirectSolver(constrained.matrix).solve(constrained.rhs, tol);
}

double relative_residual(const SparseMatrix& A, const Vector& x, const Vector& b) {
  const double r = (b - A * x).norm();
  const double bnorm = b.norm();
  return bnorm > 0.0 ? r / bnorm : r;
}

void write_matrix_market(std::ostream& out, const SparseMatrix& A) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  out << std::setprecision(17);
  for (int i = 0; i < A.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(A, i); it; ++it)
      out << i + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

void write_matrix_market(const std::string& path, const SparseMatrix& A) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open " + path + " for writing");
  write_matrix_market(out, A);
}

}  // namespace ddflow
