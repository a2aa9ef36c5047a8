#pragma once

#include <array>
#include <vector>

#include "ddflow/mesh.hpp"
#include "ddflow/quadrature.hpp"
#include "ddflow/types.hpp"

namespace ddflow {

enum class FEKind {
  P2,  ///< continuous quadratic Lagrange: one dof per vertex, then one per edge
  P1,  ///< continuous linear Lagrange, one dof per vertex
  P0,  ///< piecewise constant, one dof per cell
};

/// A (possibly vector-valued) Lagrange space. Multi-component fields are
/// stored component-blocked: [comp0 dofs..., comp1 dofs...].
/// Holds a non-owning pointer to its mesh, which must outlive the space.
struct FESpace {
  const TriMesh* mesh = nullptr;
  FEKind kind = FEKind::P2;
  int components = 1;
  int scalar_dofs = 0;                ///< dofs per component
  std::vector<Vec2> dof_coordinates;  ///< per scalar dof
  std::vector<bool> on_boundary;      ///< per scalar dof

  int dof_count() const { return components * scalar_dofs; }
  /// Per dof (all components); true for dofs lying on the boundary of the
  /// unit square. Empty meaning for P1/P0 (always false).
  std::vector<bool> dirichlet_mask() const;
  /// Global scalar dof indices of a cell (6 for P2, 3 for P1, 1 for P0).
  std::vector<int> cell_dofs(int cell) const;
};

FESpace make_p2_space(const TriMesh& mesh, int components);
FESpace make_p1_space(const TriMesh& mesh);
FESpace make_p0_space(const TriMesh& mesh, int components);

/// Nodal interpolation of a scalar function into one component of a P2/P1
/// field.
Vector interpolate(const FESpace& space, const ScalarFunction& f);
/// Nodal interpolation of a 2-vector function into a two-component space.
Vector interpolate(const FESpace& space, const VectorFunction& f);

/// Reference P2 shape functions (vertices 0..2 then edge midpoints 01, 12, 20)
/// in barycentric coordinates.
std::array<double, 6> p2_values(const std::array<double, 3>& bary);

/// Shape data of one cell at the points of a quadrature rule, mapped to
/// physical coordinates by the affine map of the triangle.
class CellValues {
 public:
  CellValues(const TriMesh& mesh, const QuadratureRule& rule);

  void reinit(int cell);

  int cell() const { return cell_; }
  int num_points() const { return num_points_; }
  double jxw(int q) const { return jxw_[q]; }
  const Vec2& point(int q) const { return points_[q]; }

  /// P2 shape value / gradient of local function i at point q.
  double p2(int q, int i) const { return p2_val_(q, i); }
  Vec2 p2_grad(int q, int i) const { return p2_grad_[q].col(i); }
  /// Constant Hessian of local P2 function i.
  const Mat2& p2_hessian(int i) const { return p2_hess_[i]; }
  double p1(int q, int i) const { return p1_val_(q, i); }
  Vec2 p1_grad(int i) const { return p1_grad_.col(i); }

  const std::array<int, 6>& p2_dofs() const { return p2_dofs_; }
  const std::array<int, 3>& p1_dofs() const { return p1_dofs_; }

  /// Value / gradient at point q of a scalar P2 field (component-blocked
  /// storage with offset = component * scalar dof count).
  double p2_value(const Vector& field, int offset, int q) const;
  Vec2 p2_gradient(const Vector& field, int offset, int q) const;
  double p1_value(const Vector& field, int q) const;

 private:
  const TriMesh* mesh_;
  const QuadratureRule* rule_;
  int cell_ = -1;
  int num_points_;
  Eigen::Matrix<double, Eigen::Dynamic, 6> p2_val_;
  Eigen::Matrix<double, Eigen::Dynamic, 3> p1_val_;
  std::vector<Eigen::Matrix<double, 2, 6>> ref_grad_;
  std::vector<Eigen::Matrix<double, 2, 6>> p2_grad_;
  std::array<Mat2, 6> p2_hess_;
  Eigen::Matrix<double, 2, 3> p1_grad_;
  std::vector<double> jxw_;
  std::vector<Vec2> points_;
  std::array<int, 6> p2_dofs_{};
  std::array<int, 3> p1_dofs_{};
};

}  // namespace ddflow
