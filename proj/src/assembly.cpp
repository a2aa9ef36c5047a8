#include "ddflow/assembly.hpp"

#include <sstream>

#include "ddflow/errors.hpp"
#include "ddflow/linalg.hpp"

namespace ddflow {
namespace {

void require_p2(const FESpace& s, int components, const char* what) {
  if (s.kind != FEKind::P2 || s.components != components || s.mesh == nullptr) {
    std::ostringstream msg;
    msg << what << ": expected a " << components << "-component P2 space";
    throw InvalidInput(msg.str());
  }
}

void require_size(const Vector& v, int n, const char* what) {
  if (v.size() != n) {
    std::ostringstream msg;
    msg << what << ": field has " << v.size() << " entries, expected " << n;
    throw InvalidInput(msg.str());
  }
}

const QuadratureRule& rule() { return triangle_rule(kAssemblyDegree); }

}  // namespace

SparseMatrix assemble_mass(const FESpace& space) {
  if (space.kind != FEKind::P2) throw InvalidInput("assemble_mass: P2 space expected");
  const TriMesh& mesh = *space.mesh;
  const int n = space.scalar_dofs;
  CellValues cv(mesh, rule());
  TripletList t;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    cv.reinit(c);
    const auto& d = cv.p2_dofs();
    for (int q = 0; q < cv.num_points(); ++q)
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
          const double v = cv.jxw(q) * cv.p2(q, i) * cv.p2(q, j);
          for (int k = 0; k < space.components; ++k) t.emplace_back(k * n + d[i], k * n + d[j], v);
        }
  }
  return from_triplets(space.dof_count(), space.dof_count(), t);
}

SparseMatrix assemble_stiffness(const FESpace& space) {
  if (space.kind != FEKind::P2) throw InvalidInput("assemble_stiffness: P2 space expected");
  const TriMesh& mesh = *space.mesh;
  const int n = space.scalar_dofs;
  CellValues cv(mesh, rule());
  TripletList t;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    cv.reinit(c);
    const auto& d = cv.p2_dofs();
    for (int q = 0; q < cv.num_points(); ++q)
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
          const double v = cv.jxw(q) * cv.p2_grad(q, i).dot(cv.p2_grad(q, j));
          for (int k = 0; k < space.components; ++k) t.emplace_back(k * n + d[i], k * n + d[j], v);
        }
  }
  return from_triplets(space.dof_count(), space.dof_count(), t);
}

SparseMatrix assemble_a(const FESpace& velocity, const Vector& T, const PhysicalModel& model) {
  require_p2(velocity, 2, "assemble_a");
  const int n = velocity.scalar_dofs;
  require_size(T, n, "assemble_a");
  const TriMesh& mesh = *velocity.mesh;
  CellValues cv(mesh, rule());
  TripletList t;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    cv.reinit(c);
    const auto& d = cv.p2_dofs();
    for (int q = 0; q < cv.num_points(); ++q) {
      const double nu = model.viscosity.value(cv.p2_value(T, 0, q));
      if (!(nu > 0.0)) throw ModelViolation("assemble_a: non-positive viscosity at a quadrature point");
      const double w = cv.jxw(q);
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
          const double mass = w * cv.p2(q, i) * cv.p2(q, j);
          const double visc = w * nu * cv.p2_grad(q, i).dot(cv.p2_grad(q, j));
          for (int k = 0; k < 2; ++k) {
            t.emplace_back(k * n + d[i], k * n + d[j], visc);
            for (int l = 0; l < 2; ++l)
              if (model.kinv(k, l) != 0.0) t.emplace_back(k * n + d[i], l * n + d[j], model.kinv(k, l) * mass);
          }
        }
    }
  }
  return from_triplets(2 * n, 2 * n, t);
}

SparseMatrix assemble_b(const FESpace& velocity, const FESpace& pressure) {
  require_p2(velocity, 2, "assemble_b");
  if (pressure.kind != FEKind::P1 || pressure.mesh != velocity.mesh)
    throw InvalidInput("assemble_b: P1 pressure space on the velocity mesh expected");
  const int n = velocity.scalar_dofs;
  const TriMesh& mesh = *velocity.mesh;
  CellValues cv(mesh, rule());
  TripletList t;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    cv.reinit(c);
    const auto& d = cv.p2_dofs();
    const auto& dp = cv.p1_dofs();
    for (int q = 0; q < cv.num_points(); ++q)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 6; ++j) {
          const Vec2 g = cv.p2_grad(q, j);
          const double w = -cv.jxw(q) * cv.p1(q, i);
          t.emplace_back(dp[i], d[j], w * g.x());
          t.emplace_back(dp[i], n + d[j], w * g.y());
        }
  }
  return from_triplets(pressure.scalar_dofs, 2 * n, t);
}

namespace {

// Scalar skew transport matrix for a velocity field w, replicated on each of
// the `components` blocks.
SparseMatrix skew_transport(const FESpace& space, const Vector& w, int w_offset_stride) {
  const int n = space.scalar_dofs;
  const TriMesh& mesh = *space.mesh;
  CellValues cv(mesh, rule());
  TripletList t;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    cv.reinit(c);
    const auto& d = cv.p2_dofs();
    for (int q = 0; q < cv.num_points(); ++q) {
      const Vec2 wq(cv.p2_value(w, 0, q), cv.p2_value(w, w_offset_stride, q));
      std::array<double, 6> conv{};
      for (int j = 0; j < 6; ++j) conv[j] = wq.dot(cv.p2_grad(q, j));
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
          const double v = 0.5 * cv.jxw(q) * (conv[j] * cv.p2(q, i) - conv[i] * cv.p2(q, j));
          for (int k = 0; k < space.components; ++k) t.emplace_back(k * n + d[i], k * n + d[j], v);
        }
    }
  }
  return from_triplets(space.dof_count(), space.dof_count(), t);
}

// Entry ((k,i), (l,j)) = 1/2 int psi_j (d_l f_k psi_i - d_l psi_i f_k) for a
// two-component field f on `rows`, directions on a two-component P2 space
// with `n_cols` scalar dofs per component.
SparseMatrix skew_transport_derivative(const FESpace& rows, int n_cols, const Vector& f) {
  const int n = rows.scalar_dofs;
  const TriMesh& mesh = *rows.mesh;
  CellValues cv(mesh, rule());
  TripletList t;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    cv.reinit(c);
    const auto& d = cv.p2_dofs();
    for (int q = 0; q < cv.num_points(); ++q) {
      const double w = 0.5 * cv.jxw(q);
      for (int k = 0; k < 2; ++k) {
        const double fk = cv.p2_value(f, k * n, q);
        const Vec2 gk = cv.p2_gradient(f, k * n, q);
        for (int i = 0; i < 6; ++i) {
          const Vec2 gi = cv.p2_grad(q, i);
          for (int j = 0; j < 6; ++j) {
            const double pj = w * cv.p2(q, j);
            for (int l = 0; l < 2; ++l)
              t.emplace_back(k * n + d[i], l * n_cols + d[j], pj * (gk[l] * cv.p2(q, i) - gi[l] * fk));
          }
        }
      }
    }
  }
  return from_triplets(2 * n, 2 * n_cols, t);
}

}  // namespace

SparseMatrix assemble_c_skew(const FESpace& velocity, const Vector& w) {
  require_p2(velocity, 2, "assemble_c_skew");
  require_size(w, velocity.dof_count(), "assemble_c_skew");
  return skew_transport(velocity, w, velocity.scalar_dofs);
}

SparseMatrix assemble_c_skew_transport(const FESpace& velocity, const Vector& u) {
  require_p2(velocity, 2, "assemble_c_skew_transport");
  require_size(u, velocity.dof_count(), "assemble_c_skew_transport");
  return skew_transport_derivative(velocity, velocity.scalar_dofs, u);
}

SparseMatrix assemble_ay(const FESpace& pair, const PhysicalModel& model) {
  require_p2(pair, 2, "assemble_ay");
  if (!(model.alpha2() > 0.0)) throw ModelViolation("assemble_ay: D is not positive definite");
  const int n = pair.scalar_dofs;
  const TriMesh& mesh = *pair.mesh;
  CellValues cv(mesh, rule());
  TripletList t;
  const Mat2& D = model.diffusion;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    cv.reinit(c);
    const auto& d = cv.p2_dofs();
    for (int q = 0; q < cv.num_points(); ++q)
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
          const double v = cv.jxw(q) * cv.p2_grad(q, i).dot(cv.p2_grad(q, j));
          for (int k = 0; k < 2; ++k)
            for (int m = 0; m < 2; ++m)
              if (D(k, m) != 0.0) t.emplace_back(k * n + d[i], m * n + d[j], D(k, m) * v);
        }
  }
  return from_triplets(2 * n, 2 * n, t);
}

SparseMatrix assemble_cy_skew(const FESpace& pair, const Vector& w) {
  require_p2(pair, 2, "assemble_cy_skew");
  require_size(w, pair.dof_count(), "assemble_cy_skew");
  return skew_transport(pair, w, pair.scalar_dofs);
}

SparseMatrix assemble_cy_skew_transport(const FESpace& pair, const FESpace& velocity, const Vector& y) {
  require_p2(pair, 2, "assemble_cy_skew_transport");
  require_p2(velocity, 2, "assemble_cy_skew_transport");
  require_size(y, pair.dof_count(), "assemble_cy_skew_transport");
  return skew_transport_derivative(pair, velocity.scalar_dofs, y);
}

Vector assemble_buoyancy(const FESpace& velocity, const Vector& y, const PhysicalModel& model) {
  require_p2(velocity, 2, "assemble_buoyancy");
  const int n = velocity.scalar_dofs;
  require_size(y, 2 * n, "assemble_buoyancy");
  const TriMesh& mesh = *velocity.mesh;
  CellValues cv(mesh, rule());
  Vector load = Vector::Zero(2 * n);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    cv.reinit(c);
    const auto& d = cv.p2_dofs();
    for (int q = 0; q < cv.num_points(); ++q) {
      const Vec2 yq(cv.p2_value(y, 0, q), cv.p2_value(y, n, q));
      const Vec2 F = model.buoyancy.value(yq);
      for (int i = 0; i < 6; ++i) {
        const double w = cv.jxw(q) * cv.p2(q, i);
        load[d[i]] += w * F.x();
        load[n + d[i]] += w * F.y();
      }
    }
  }
  return load;
}

SparseMatrix assemble_buoyancy_jacobian(const FESpace& velocity, const Vector& y, const PhysicalModel& model) {
  require_p2(velocity, 2, "assemble_buoyancy_jacobian");
  const int n = velocity.scalar_dofs;
  require_size(y, 2 * n, "assemble_buoyancy_jacobian");
  const TriMesh& mesh = *velocity.mesh;
  CellValues cv(mesh, rule());
  TripletList t;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    cv.reinit(c);
    const auto& d = cv.p2_dofs();
    for (int q = 0; q < cv.num_points(); ++q) {
      const Vec2 yq(cv.p2_value(y, 0, q), cv.p2_value(y, n, q));
      const Mat2 Fy = model.buoyancy.jacobian(yq);
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
          const double v = cv.jxw(q) * cv.p2(q, i) * cv.p2(q, j);
          for (int k = 0; k < 2; ++k)
            for (int m = 0; m < 2; ++m)
              if (Fy(k, m) != 0.0) t.emplace_back(k * n + d[i], m * n + d[j], Fy(k, m) * v);
        }
    }
  }
  return from_triplets(2 * n, 2 * n, t);
}

SparseMatrix assemble_viscosity_sensitivity(const FESpace& velocity, const Vector& u, const Vector& T,
                                            const PhysicalModel& model) {
  require_p2(velocity, 2, "assemble_viscosity_sensitivity");
  const int n = velocity.scalar_dofs;
  require_size(u, 2 * n, "assemble_viscosity_sensitivity");
  require_size(T, n, "assemble_viscosity_sensitivity");
  const TriMesh& mesh = *velocity.mesh;
  CellValues cv(mesh, rule());
  TripletList t;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    cv.reinit(c);
    const auto& d = cv.p2_dofs();
    for (int q = 0; q < cv.num_points(); ++q) {
      const double nuT = model.viscosity.d1(cv.p2_value(T, 0, q));
      if (nuT == 0.0) continue;
      const std::array<Vec2, 2> gu = {cv.p2_gradient(u, 0, q), cv.p2_gradient(u, n, q)};
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
          const double w = cv.jxw(q) * nuT * cv.p2(q, j);
          for (int k = 0; k < 2; ++k) t.emplace_back(k * n + d[i], d[j], w * gu[k].dot(cv.p2_grad(q, i)));
        }
    }
  }
  return from_triplets(2 * n, n, t);
}

SparseMatrix assemble_control_coupling(const FESpace& velocity, const FESpace& control) {
  require_p2(velocity, 2, "assemble_control_coupling");
  if (control.kind != FEKind::P0 || control.components != 2)
    throw InvalidInput("assemble_control_coupling: two-component P0 control space expected");
  const int n = velocity.scalar_dofs;
  const int nc = control.scalar_dofs;
  const TriMesh& mesh = *velocity.mesh;
  CellValues cv(mesh, rule());
  TripletList t;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    cv.reinit(c);
    const auto& d = cv.p2_dofs();
    for (int i = 0; i < 6; ++i) {
      double v = 0.0;
      for (int q = 0; q < cv.num_points(); ++q) v += cv.jxw(q) * cv.p2(q, i);
      for (int k = 0; k < 2; ++k) t.emplace_back(k * n + d[i], k * nc + c, v);
    }
  }
  return from_triplets(2 * n, 2 * nc, t);
}

Vector assemble_source(const FESpace& space, const VectorFunction& f) {
  require_p2(space, 2, "assemble_source");
  const int n = space.scalar_dofs;
  Vector load = Vector::Zero(2 * n);
  if (!f) return load;
  const TriMesh& mesh = *space.mesh;
  CellValues cv(mesh, rule());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    cv.reinit(c);
    const auto& d = cv.p2_dofs();
    for (int q = 0; q < cv.num_points(); ++q) {
      const Vec2 fq = f(cv.point(q));
      for (int i = 0; i < 6; ++i) {
        const double w = cv.jxw(q) * cv.p2(q, i);
        load[d[i]] += w * fq.x();
        load[n + d[i]] += w * fq.y();
      }
    }
  }
  return load;
}

Vector assemble_pressure_mean(const FESpace& pressure) {
  if (pressure.kind != FEKind::P1) throw InvalidInput("assemble_pressure_mean: P1 space expected");
  const TriMesh& mesh = *pressure.mesh;
  Vector m = Vector::Zero(pressure.scalar_dofs);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const double third = mesh.signed_area(c) / 3.0;
    for (int v : mesh.triangles[c]) m[v] += third;
  }
  return m;
}

Vector apply_lifting(const FESpace& pair, const VectorFunction& y_boundary) {
  require_p2(pair, 2, "apply_lifting");
  const int n = pair.scalar_dofs;
  LinearSystem sys;
  sys.matrix = assemble_stiffness(pair);
  sys.rhs = Vector::Zero(2 * n);
  for (int i = 0; i < n; ++i) {
    if (!pair.on_boundary[i]) continue;
    const Vec2 g = y_boundary(pair.dof_coordinates[i]);
    sys.constrained_dofs[i] = g.x();
    sys.constrained_dofs[n + i] = g.y();
  }
  return solve(sys, 1e-12);
}

}  // namespace ddflow
