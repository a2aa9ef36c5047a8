#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>
#include <sstream>

#include "ddflow/errors.hpp"
#include "ddflow/linalg.hpp"

using namespace ddflow;

namespace {

// 1D Laplacian plus a skew part, diagonally dominant.
SparseMatrix test_matrix(int n) {
  TripletList t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 4.0);
    if (i > 0) t.emplace_back(i, i - 1, -1.5);
    if (i + 1 < n) t.emplace_back(i, i + 1, -0.5);
  }
  return from_triplets(n, n, t);
}

}  // namespace

TEST(Linalg, SpmvMatchesDense) {
  const SparseMatrix A = test_matrix(6);
  const Vector x = Vector::LinSpaced(6, -1.0, 2.0);
  EXPECT_LT((spmv(A, x) - Eigen::MatrixXd(A) * x).norm(), 1e-15);
  EXPECT_THROW(spmv(A, Vector::Zero(5)), InvalidInput);
}

TEST(Linalg, TripletsAreSummed) {
  TripletList t{{0, 0, 1.0}, {0, 0, 2.0}, {1, 0, -1.0}};
  const SparseMatrix A = from_triplets(2, 2, t);
  EXPECT_DOUBLE_EQ(A.coeff(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(A.coeff(1, 0), -1.0);
}

TEST(Linalg, DirectSolveMatchesDenseOracle) {
  const int n = 40;
  const SparseMatrix A = test_matrix(n);
  std::mt19937 rng(7);
  std::normal_distribution<double> dist;
  Vector b(n);
  for (int i = 0; i < n; ++i) b[i] = dist(rng);
  const Vector ref = Eigen::MatrixXd(A).partialPivLu().solve(b);
  SparseDirectSolver solver(A);
  const Vector x = solver.solve(b);
  EXPECT_LT((x - ref).norm(), 1e-12 * ref.norm());
  EXPECT_LT(relative_residual(A, x, b), 1e-12);
  EXPECT_EQ(solver.solve(Vector::Zero(n)).norm(), 0.0);
}

TEST(Linalg, ConstraintsGiveIdentityRows) {
  const int n = 10;
  LinearSystem sys{test_matrix(n), Vector::Ones(n), {{0, 2.0}, {9, -1.0}}};
  const Vector x = solve(sys);
  EXPECT_NEAR(x[0], 2.0, 1e-14);
  EXPECT_NEAR(x[9], -1.0, 1e-14);
  const Vector r = Eigen::MatrixXd(test_matrix(n)) * x - Vector::Ones(n);
  EXPECT_LT(r.segment(1, n - 2).norm(), 1e-12);
}

TEST(Linalg, HomogeneousConstraintCommutesWithTranspose) {
  const SparseMatrix A = test_matrix(8);
  std::vector<bool> mask(8, false);
  mask[0] = mask[3] = true;
  const Eigen::MatrixXd lhs = Eigen::MatrixXd(constrain_homogeneous(A, mask)).transpose();
  const Eigen::MatrixXd rhs = Eigen::MatrixXd(constrain_homogeneous(SparseMatrix(A.transpose()), mask));
  EXPECT_LT((lhs - rhs).norm(), 1e-15);
}

TEST(Linalg, SingularMatrixFails) {
  TripletList t{{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}};
  EXPECT_THROW(
      {
        SparseDirectSolver s(from_triplets(2, 2, t));
        s.solve(Vector::Ones(2));
      },
      SolverFailure);
}

TEST(Linalg, MatrixMarketHeader) {
  std::ostringstream out;
  write_matrix_market(out, test_matrix(3));
  EXPECT_EQ(out.str().rfind("%%MatrixMarket matrix coordinate real general", 0), 0u);
}
