#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ddflow/optimizer.hpp"
#include "ddflow/verification.hpp"

using namespace ddflow;

namespace {

FlowProblem small_problem(int n, double lambda = 1e-2) {
  BoussinesqParams bp;
  bp.lambda = lambda;
  PhysicalModel m = default_boussinesq_model(bp);
  m.u_desired = [](const Vec2& x) { return Vec2(x.y() - 0.5, 0.5 - x.x()); };
  m.y_desired = [](const Vec2& x) { return Vec2(x.x(), 0.5 * x.y()); };
  return FlowProblem(n, m);
}

}  // namespace

TEST(Projection, ClampExamples) {
  Vector v(4), lo(4), hi(4);
  v << -2.0, 0.5, 3.0, 1.0;
  lo << -1.0, -1.0, -1.0, 1.0;
  hi << 1.0, 1.0, 1.0, 1.0;
  Vector expected(4);
  expected << -1.0, 0.5, 1.0, 1.0;
  EXPECT_EQ(clamp(v, lo, hi), expected);
}

TEST(Projection, LawsOnRandomFields) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  const int m = 64;
  for (int k = 0; k < 100; ++k) {
    Vector lo(m), hi(m), v(m), w(m);
    for (int i = 0; i < m; ++i) {
      const double a = d(rng), b = d(rng);
      lo[i] = std::min(a, b);
      hi[i] = std::max(a, b);
      v[i] = 2 * d(rng);
      w[i] = 2 * d(rng);
    }
    const Vector pv = clamp(v, lo, hi), pw = clamp(w, lo, hi);
    EXPECT_EQ(clamp(pv, lo, hi), pv);
    EXPECT_LE((pv - pw).norm(), (v - w).norm() + 1e-14);
    // variational inequality (v - Pv, z - Pv) <= 0 for admissible z
    EXPECT_LE((v - pv).dot(pw - pv), 1e-12);
  }
}

TEST(Projection, ControlFieldValidation) {
  ControlField U = ControlField::uniform(4, 2.0, -1.0, 1.0);
  EXPECT_NO_THROW(U.validate());
  EXPECT_EQ(project(U).values, Vector::Constant(4, 1.0));
  U.lower[2] = 3.0;
  EXPECT_THROW(U.validate(), InvalidInput);
  U = ControlField::uniform(4, 0.0, -1.0, 1.0);
  U.upper.resize(3);
  EXPECT_THROW(U.validate(), InvalidInput);
}

TEST(ControlNorms, ConstantField) {
  const FlowProblem pb = small_problem(4);
  const int nc = pb.mesh().num_cells();
  Vector v(2 * nc);
  v.head(nc).setConstant(3.0);
  v.tail(nc).setConstant(4.0);
  for (double p : {1.0, 4.0 / 3.0, 2.0}) EXPECT_NEAR(control_norm(pb, v, p), 5.0, 1e-13);
  EXPECT_NEAR(control_inner(pb, v, v), 25.0, 1e-13);
  EXPECT_THROW(control_norm(pb, v, 0.5), InvalidInput);
}

TEST(ControlNorms, InterpolationInequality) {
  const FlowProblem pb = small_problem(6);
  for (const Vector& v : random_directions(pb.num_controls(), 20, 17)) {
    const double l43 = control_norm(pb, v, 4.0 / 3.0);
    EXPECT_LE(l43 * l43, control_norm(pb, v, 1.0) * control_norm(pb, v, 2.0) * (1 + 1e-12));
  }
}

TEST(Cost, TermsAndDifference) {
  const FlowProblem pb = small_problem(4);
  const Vector U = random_directions(pb.num_controls(), 1, 2).front();
  const StateFields s = solve_state(pb, U).state;
  const CostTerms c = cost_terms(pb, s, U);
  EXPECT_NEAR(c.regularization, 0.5 * pb.model().lambda * control_inner(pb, U, U), 1e-15);
  EXPECT_DOUBLE_EQ(reduced_cost(pb, U, NewtonOptions{1e-12}), c.total());
  const Vector U2 = 1.1 * U;
  const StateFields s2 = solve_state(pb, U2).state;
  EXPECT_NEAR(cost_difference(pb, s, U, s2, U2), cost_terms(pb, s2, U2).total() - c.total(), 1e-12);
}

TEST(Cost, CellAverageOfLinearField) {
  const FlowProblem pb = small_problem(4);
  const int n = pb.layout().n2, nc = pb.mesh().num_cells();
  Vector f(2 * n);
  for (int i = 0; i < n; ++i) {
    const Vec2& x = pb.velocity().dof_coordinates[i];
    f[i] = x.x();
    f[n + i] = 2.0 * x.y();
  }
  const Vector avg = cell_average(pb, f);
  for (int c = 0; c < nc; ++c) {
    EXPECT_NEAR(avg[c], pb.mesh().centroid(c).x(), 1e-14);
    EXPECT_NEAR(avg[nc + c], 2.0 * pb.mesh().centroid(c).y(), 1e-14);
  }
}

TEST(Optimizer, ConvergesOnSmallProblem) {
  const FlowProblem pb = small_problem(4, 0.1);
  const ControlField U0 = ControlField::uniform(pb.num_controls(), 0.0, -0.5, 0.5);
  OptimizeOptions opts;
  opts.kkt_tol = 1e-8;
  const OptimizationResult r = optimize(pb, U0, opts);
  EXPECT_EQ(r.report.termination, Termination::Converged);
  EXPECT_LE(vi_residual(pb, r.control, r.adjoint), 1e-8);
  for (std::size_t k = 1; k < r.report.history.size(); ++k)
    EXPECT_LE(r.report.history[k].cost, r.report.history[k - 1].cost + 1e-14);
  EXPECT_TRUE(r.control.values.maxCoeff() <= 0.5 && r.control.values.minCoeff() >= -0.5);
}

TEST(Optimizer, ZeroTargetsKeepZeroControl) {
  const FlowProblem pb(4, default_boussinesq_model());
  const ControlField U0 = ControlField::uniform(pb.num_controls(), 0.0, -1.0, 1.0);
  const OptimizationResult r = optimize(pb, U0);
  EXPECT_EQ(r.report.termination, Termination::Converged);
  EXPECT_EQ(r.control.values.lpNorm<Eigen::Infinity>(), 0.0);
}
