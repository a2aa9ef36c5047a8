#include "ddflow/sensitivity.hpp"

#include <cmath>

#include "ddflow/assembly.hpp"

namespace ddflow {

StateLinearization::StateLinearization(const FlowProblem& problem, const StateFields& state)
    : problem_(&problem),
      state_(state),
      jacobian_(newton_jacobian(problem, pack(problem, state))),
      solver_(jacobian_) {}

LinearizedFields StateLinearization::solve_linearized(const Vector& h) const {
  const FlowProblem& pb = *problem_;
  const DofLayout& L = pb.layout();
  if (h.size() != pb.num_controls()) throw InvalidInput("solve_linearized: direction size mismatch");
  Vector rhs = Vector::Zero(L.size());
  rhs.segment(L.u(), 2 * L.n2) = pb.control_coupling() * h;
  for (int i = 0; i < L.size(); ++i)
    if (pb.constrained()[i]) rhs[i] = 0.0;
  const Vector dx = solver_.solve(rhs);
  const StateFields s = unpack(pb, dx);
  return {s.u, s.y, s.p, s.multiplier};
}

AdjointFields StateLinearization::solve_adjoint() const {
  const FlowProblem& pb = *problem_;
  return solve_adjoint(pb.velocity_mass() * (state_.u - pb.u_target()), pb.pair_mass() * (state_.y - pb.y_target()));
}

AdjointFields StateLinearization::solve_adjoint(const Vector& load_u, const Vector& load_y) const {
  const FlowProblem& pb = *problem_;
  const DofLayout& L = pb.layout();
  if (load_u.size() != 2 * L.n2 || load_y.size() != 2 * L.n2)
    throw InvalidInput("solve_adjoint: load size mismatch");
  Vector rhs = Vector::Zero(L.size());
  rhs.segment(L.u(), 2 * L.n2) = load_u;
  rhs.segment(L.y(), 2 * L.n2) = load_y;
  for (int i = 0; i < L.size(); ++i)
    if (pb.constrained()[i]) rhs[i] = 0.0;
  const Vector lam = solver_.solve_transpose(rhs);
  AdjointFields a;
  a.phi = lam.segment(L.u(), 2 * L.n2);
  a.xi = lam.segment(L.p(), L.n1);
  a.multiplier = lam[L.multiplier()];
  a.eta = lam.segment(L.y(), 2 * L.n2);
  a.residual = (jacobian_.transpose() * lam - rhs).norm();
  return a;
}

LinearizedFields solve_linearized(const FlowProblem& problem, const StateFields& state, const Vector& h) {
  return StateLinearization(problem, state).solve_linearized(h);
}

AdjointFields solve_adjoint(const FlowProblem& problem, const StateFields& state) {
  return StateLinearization(problem, state).solve_adjoint();
}

SparseMatrix assemble_adjoint_operator(const FlowProblem& problem, const StateFields& state) {
  const DofLayout& L = problem.layout();
  const PhysicalModel& model = problem.model();
  const TriMesh& mesh = problem.mesh();
  const int n2 = L.n2;
  const int U = L.u(), P = L.p(), Y = L.y(), ML = L.multiplier();
  CellValues cv(mesh, triangle_rule(kAssemblyDegree));
  TripletList t;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    cv.reinit(c);
    const auto& d = cv.p2_dofs();
    const auto& dp = cv.p1_dofs();
    for (int q = 0; q < cv.num_points(); ++q) {
      const double w = cv.jxw(q);
      const Vec2 ub(cv.p2_value(state.u, 0, q), cv.p2_value(state.u, n2, q));
      const Vec2 yb(cv.p2_value(state.y, 0, q), cv.p2_value(state.y, n2, q));
      Mat2 gu, gy;  // rows: component, columns: derivative direction
      gu.row(0) = cv.p2_gradient(state.u, 0, q).transpose();
      gu.row(1) = cv.p2_gradient(state.u, n2, q).transpose();
      gy.row(0) = cv.p2_gradient(state.y, 0, q).transpose();
      gy.row(1) = cv.p2_gradient(state.y, n2, q).transpose();
      const double nu = model.viscosity.value(yb.x());
      const double nu_T = model.viscosity.d1(yb.x());
      const Mat2 Fy = model.buoyancy.jacobian(yb);

      for (int i = 0; i < 6; ++i) {
        const double vi = cv.p2(q, i);
        const Vec2 gi = cv.p2_grad(q, i);
        for (int j = 0; j < 6; ++j) {
          const double vj = cv.p2(q, j);
          const Vec2 gj = cv.p2_grad(q, j);
          const double gij = gi.dot(gj);
          const double ub_gi = ub.dot(gi), ub_gj = ub.dot(gj);
          for (int k = 0; k < 2; ++k) {
            for (int l = 0; l < 2; ++l) {
              // test v = psi_i e_k, adjoint velocity phi = psi_j e_l
              double a = model.kinv(l, k) * vi * vj;
              if (k == l) a += nu * gij + 0.5 * (ub_gi * vj - ub_gj * vi);
              a += 0.5 * (vi * gu(l, k) * vj - vi * gj[k] * ub[l]);
              t.emplace_back(U + k * n2 + d[i], U + l * n2 + d[j], w * a);
              // test v = psi_i e_k, adjoint scalar eta = psi_j e_l
              const double cy = 0.5 * (vi * gy(l, k) * vj - vi * gj[k] * yb[l]);
              t.emplace_back(U + k * n2 + d[i], Y + l * n2 + d[j], w * cy);
              // test s = psi_i e_k, adjoint scalar eta = psi_j e_l
              double ay = model.diffusion(l, k) * gij;
              if (k == l) ay += 0.5 * (ub_gi * vj - ub_gj * vi);
              t.emplace_back(Y + k * n2 + d[i], Y + l * n2 + d[j], w * ay);
              // test s = psi_i e_k, adjoint velocity phi = psi_j e_l
              double sv = -Fy(l, k) * vi * vj;
              if (k == 0) sv += nu_T * vi * gu.row(l).dot(gj);
              t.emplace_back(Y + k * n2 + d[i], U + l * n2 + d[j], w * sv);
            }
          }
        }
        for (int j = 0; j < 3; ++j) {
          const double pj = cv.p1(q, j);
          for (int k = 0; k < 2; ++k) {
            // b(v, xi) and b(phi, q)
            t.emplace_back(U + k * n2 + d[i], P + dp[j], -w * pj * gi[k]);
            t.emplace_back(P + dp[j], U + k * n2 + d[i], -w * pj * gi[k]);
          }
        }
      }
    }
    for (int j = 0; j < 3; ++j) {
      const double mj = mesh.signed_area(c) / 3.0;
      t.emplace_back(P + dp[j], ML, mj);
      t.emplace_back(ML, P + dp[j], mj);
    }
  }
  return from_triplets(L.size(), L.size(), t);
}

TransposeReport check_transpose_consistency(const FlowProblem& problem, const StateFields& state, double tol) {
  const SparseMatrix J = newton_jacobian(problem, pack(problem, state), 1.0, false);
  const SparseMatrix A = assemble_adjoint_operator(problem, state);
  const SparseMatrix D = A - SparseMatrix(J.transpose());
  const auto& fixed = problem.constrained();
  TransposeReport rep;
  for (bool f : fixed) (f ? rep.constrained_dofs : rep.free_dofs)++;
  for (int r = 0; r < J.outerSize(); ++r) {
    if (fixed[r]) continue;
    for (SparseMatrix::InnerIterator it(J, r); it; ++it)
      if (!fixed[it.col()]) rep.max_entry = std::max(rep.max_entry, std::abs(it.value()));
  }
  for (int r = 0; r < D.outerSize(); ++r) {
    if (fixed[r]) continue;
    for (SparseMatrix::InnerIterator it(D, r); it; ++it)
      if (!fixed[it.col()]) rep.max_deviation = std::max(rep.max_deviation, std::abs(it.value()));
  }
  rep.passed = rep.max_deviation <= tol * rep.max_entry;
  return rep;
}

}  // namespace ddflow
