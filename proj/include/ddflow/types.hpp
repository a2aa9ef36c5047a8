#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <vector>

namespace ddflow {

using Vector = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Compressed sparse row storage: outer index = row offsets, inner index =
/// column indices (strictly increasing per row once compressed).
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Triplet = Eigen::Triplet<double, int>;
using TripletList = std::vector<Triplet>;

/// Pointwise analytic data on the plane, e.g. boundary values or targets.
using ScalarFunction = std::function<double(const Vec2&)>;
using VectorFunction = std::function<Vec2(const Vec2&)>;

}  // namespace ddflow
