#include "ddflow/fe.hpp"

#include "ddflow/errors.hpp"

namespace ddflow {
namespace {

bool on_unit_square_boundary(const Vec2& p) {
  return p.x() == 0.0 || p.x() == 1.0 || p.y() == 0.0 || p.y() == 1.0;
}

// Gradients of the barycentric coordinates on the reference triangle.
const std::array<Vec2, 3> kRefBaryGrad = {Vec2(-1.0, -1.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};
constexpr std::array<std::array<int, 2>, 3> kEdgeVertices = {{{0, 1}, {1, 2}, {2, 0}}};

}  // namespace

std::vector<bool> FESpace::dirichlet_mask() const {
  std::vector<bool> mask(static_cast<std::size_t>(dof_count()), false);
  if (kind != FEKind::P2) return mask;
  for (int c = 0; c < components; ++c)
    for (int i = 0; i < scalar_dofs; ++i)
      mask[c * scalar_dofs + i] = on_boundary[i];
  return mask;
}

std::vector<int> FESpace::cell_dofs(int cell) const {
  const TriMesh& mesh = *this->mesh;
  const auto& t = mesh.triangles[cell];
  switch (kind) {
    case FEKind::P0:
      return {cell};
    case FEKind::P1:
      return {t[0], t[1], t[2]};
    case FEKind::P2: {
      const auto& e = mesh.triangle_edges[cell];
      const int nv = mesh.num_vertices();
      return {t[0], t[1], t[2], nv + e[0], nv + e[1], nv + e[2]};
    }
  }
  return {};
}

FESpace make_p2_space(const TriMesh& mesh, int components) {
  FESpace s;
  s.mesh = &mesh;
  s.kind = FEKind::P2;
  s.components = components;
  s.scalar_dofs = mesh.num_vertices() + mesh.num_edges();
  s.dof_coordinates = mesh.vertices;
  for (int e = 0; e < mesh.num_edges(); ++e) s.dof_coordinates.push_back(mesh.edge_midpoint(e));
  for (const auto& p : s.dof_coordinates) s.on_boundary.push_back(on_unit_square_boundary(p));
  return s;
}

FESpace make_p1_space(const TriMesh& mesh) {
  FESpace s;
  s.mesh = &mesh;
  s.kind = FEKind::P1;
  s.scalar_dofs = mesh.num_vertices();
  s.dof_coordinates = mesh.vertices;
  s.on_boundary.assign(s.scalar_dofs, false);
  for (int i = 0; i < s.scalar_dofs; ++i)
    s.on_boundary[i] = on_unit_square_boundary(mesh.vertices[i]);
  return s;
}

FESpace make_p0_space(const TriMesh& mesh, int components) {
  FESpace s;
  s.mesh = &mesh;
  s.kind = FEKind::P0;
  s.components = components;
  s.scalar_dofs = mesh.num_cells();
  for (int c = 0; c < mesh.num_cells(); ++c) s.dof_coordinates.push_back(mesh.centroid(c));
  s.on_boundary.assign(s.scalar_dofs, false);
  return s;
}

Vector interpolate(const FESpace& space, const ScalarFunction& f) {
  if (space.components != 1) throw InvalidInput("interpolate: scalar function into vector space");
  Vector v(space.scalar_dofs);
  for (int i = 0; i < space.scalar_dofs; ++i) v[i] = f(space.dof_coordinates[i]);
  return v;
}

Vector interpolate(const FESpace& space, const VectorFunction& f) {
  if (space.components != 2) throw InvalidInput("interpolate: vector function needs a two-component space");
  const int n = space.scalar_dofs;
  Vector v(2 * n);
  for (int i = 0; i < n; ++i) {
    const Vec2 val = f(space.dof_coordinates[i]);
    v[i] = val.x();
    v[n + i] = val.y();
  }
  return v;
}

std::array<double, 6> p2_values(const std::array<double, 3>& L) {
  return {L[0] * (2 * L[0] - 1), L[1] * (2 * L[1] - 1), L[2] * (2 * L[2] - 1),
          4 * L[0] * L[1],       4 * L[1] * L[2],       4 * L[2] * L[0]};
}

CellValues::CellValues(const TriMesh& mesh, const QuadratureRule& rule)
    : mesh_(&mesh), rule_(&rule), num_points_(rule.size()) {
  p2_val_.resize(num_points_, 6);
  p1_val_.resize(num_points_, 3);
  ref_grad_.resize(num_points_);
  p2_grad_.resize(num_points_);
  jxw_.resize(num_points_);
  points_.resize(num_points_);
  for (int q = 0; q < num_points_; ++q) {
    const auto& L = rule.points[q];
    const auto v = p2_values(L);
    for (int i = 0; i < 6; ++i) p2_val_(q, i) = v[i];
    for (int i = 0; i < 3; ++i) p1_val_(q, i) = L[i];
    auto& g = ref_grad_[q];
    for (int i = 0; i < 3; ++i) g.col(i) = (4.0 * L[i] - 1.0) * kRefBaryGrad[i];
    for (int k = 0; k < 3; ++k) {
      const int a = kEdgeVertices[k][0], b = kEdgeVertices[k][1];
      g.col(3 + k) = 4.0 * (L[a] * kRefBaryGrad[b] +
                            L[b] * kRefBaryGrad[a]);
    }
  }
}

void CellValues::reinit(int cell) {
  cell_ = cell;
  const auto& t = mesh_->triangles[cell];
  const Vec2& v0 = mesh_->vertices[t[0]];
  const Vec2& v1 = mesh_->vertices[t[1]];
  const Vec2& v2 = mesh_->vertices[t[2]];
  Mat2 J;
  J.col(0) = v1 - v0;
  J.col(1) = v2 - v0;
  const double det = J.determinant();
  const Mat2 JinvT = J.inverse().transpose();

  std::array<Vec2, 3> bary_grad;
  for (int i = 0; i < 3; ++i) bary_grad[i] = JinvT * kRefBaryGrad[i];
  for (int i = 0; i < 3; ++i) {
    const Vec2& g = bary_grad[i];
    p1_grad_.col(i) = g;
    p2_hess_[i] = 4.0 * g * g.transpose();
  }
  for (int k = 0; k < 3; ++k) {
    const Vec2& ga = bary_grad[kEdgeVertices[k][0]];
    const Vec2& gb = bary_grad[kEdgeVertices[k][1]];
    p2_hess_[3 + k] = 4.0 * (ga * gb.transpose() + gb * ga.transpose());
  }

  for (int q = 0; q < num_points_; ++q) {
    const auto& L = rule_->points[q];
    p2_grad_[q] = JinvT * ref_grad_[q];
    jxw_[q] = rule_->weights[q] * det;
    points_[q] = L[0] * v0 + L[1] * v1 + L[2] * v2;
  }

  const auto& e = mesh_->triangle_edges[cell];
  const int nv = mesh_->num_vertices();
  p2_dofs_ = {t[0], t[1], t[2], nv + e[0], nv + e[1], nv + e[2]};
  p1_dofs_ = {t[0], t[1], t[2]};
}

double CellValues::p2_value(const Vector& field, int offset, int q) const {
  double v = 0.0;
  for (int i = 0; i < 6; ++i) v += field[offset + p2_dofs_[i]] * p2_val_(q, i);
  return v;
}

Vec2 CellValues::p2_gradient(const Vector& field, int offset, int q) const {
  Vec2 g = Vec2::Zero();
  const auto& G = p2_grad_[q];
  for (int i = 0; i < 6; ++i) g += field[offset + p2_dofs_[i]] * G.col(i);
  return g;
}

double CellValues::p1_value(const Vector& field, int q) const {
  double v = 0.0;
  for (int i = 0; i < 3; ++i) v += field[p1_dofs_[i]] * p1_val_(q, i);
  return v;
}

}  // namespace ddflow
