#include <gtest/gtest.h>

#include "ddflow/ssc.hpp"
#include "ddflow/verification.hpp"

using namespace ddflow;

namespace {

FlowProblem coupled_problem(int n, double lambda) {
  BoussinesqParams bp;
  bp.buoyancy = "sine";
  bp.g_T = 2.0;
  bp.lambda = lambda;
  PhysicalModel m = default_boussinesq_model(bp);
  m.y_boundary = [](const Vec2& x) { return Vec2(x.x(), 0.5 * x.y()); };
  m.u_desired = [](const Vec2& x) { return Vec2(x.y() - 0.5, 0.5 - x.x()); };
  m.y_desired = [](const Vec2&) { return Vec2(0.5, 0.25); };
  return FlowProblem(n, m);
}

// State and adjoint at a given control; not an optimum.
OptimizationResult point(const FlowProblem& pb, const ControlField& U) {
  OptimizationResult r;
  r.control = U;
  r.state = solve_state(pb, U.values, NewtonOptions{1e-13}).state;
  r.adjoint = solve_adjoint(pb, r.state);
  return r;
}

AdjointFields constant_adjoint(const FlowProblem& pb, double value) {
  AdjointFields a;
  a.phi = Vector::Constant(2 * pb.layout().n2, value);
  a.eta = Vector::Zero(2 * pb.layout().n2);
  a.xi = Vector::Zero(pb.layout().n1);
  return a;
}

}  // namespace

TEST(ActiveSet, TrivialExamples) {
  const FlowProblem pb(4, default_boussinesq_model());
  const Vector U = Vector::Ones(pb.num_controls());
  const AdjointFields a = constant_adjoint(pb, 0.5);
  EXPECT_EQ(strongly_active_set(pb, U, a, 1.0, 1.0).count(), pb.num_controls());
  EXPECT_EQ(strongly_active_set(pb, U, a, 1.0, 2.0).count(), 0);
  EXPECT_THROW(strongly_active_set(pb, U, a, 1.0, 0.0), InvalidInput);
}

TEST(ActiveSet, ShrinksAsEpsilonGrows) {
  const FlowProblem pb = coupled_problem(4, 1e-2);
  const OptimizationResult r = point(pb, ControlField{random_directions(pb.num_controls(), 1, 3).front(),
                                                      Vector::Constant(pb.num_controls(), -1.0),
                                                      Vector::Constant(pb.num_controls(), 1.0)});
  ActiveSetMask prev = strongly_active_set(pb, r.control.values, r.adjoint, 1e-2, 1e-8);
  for (double eps : {1e-4, 1e-3, 1e-2, 1e-1}) {
    const ActiveSetMask m = strongly_active_set(pb, r.control.values, r.adjoint, 1e-2, eps);
    for (std::size_t i = 0; i < m.mask.size(); ++i)
      if (m.mask[i]) EXPECT_TRUE(prev.mask[i]);
    prev = m;
  }
}

TEST(ActiveSet, EstimateHoldsForBoundaryOptimum) {
  // Ubar at the lower bound where lambda Ubar + phi > eps: every admissible U moves up.
  const FlowProblem pb(4, default_boussinesq_model());
  const int m = pb.num_controls();
  const Vector Ubar = Vector::Constant(m, -1.0);
  const AdjointFields a = constant_adjoint(pb, 2.0);
  const ActiveSetMask mask = strongly_active_set(pb, Ubar, a, 1.0, 0.5);
  ASSERT_EQ(mask.count(), m);
  for (const Vector& d : random_directions(m, 5, 9)) {
    const Vector U = Ubar + d.cwiseAbs();
    const ActiveEstimateReport rep = verify_active_estimate(pb, U, Ubar, a, 1.0, mask);
    EXPECT_TRUE(rep.passed);
    EXPECT_GE(rep.lhs, rep.rhs);
  }
}

TEST(SecondForm, RegularizationOnly) {
  const FlowProblem pb = coupled_problem(4, 2.0);
  const int n = pb.layout().n2, nc = pb.mesh().num_cells();
  const StateFields s = solve_state(pb, Vector::Zero(pb.num_controls())).state;
  const AdjointFields a = constant_adjoint(pb, 0.0);
  Vector h = Vector::Zero(2 * nc);
  h.head(nc).setOnes();
  const SecondFormTerms t = lagrangian_second_form(pb, s, a, Vector::Zero(2 * n), Vector::Zero(2 * n), h);
  EXPECT_NEAR(t.regularization, 2.0, 1e-13);
  EXPECT_NEAR(t.total(), 2.0, 1e-13);
}

TEST(SecondForm, DiagonalDropsMixedTerms) {
  const FlowProblem pb = coupled_problem(4, 1e-2);
  const OptimizationResult r = point(pb, ControlField::uniform(pb.num_controls(), 0.3, -1.0, 1.0));
  const Vector h = random_directions(pb.num_controls(), 1, 4).front();
  const LinearizedFields lin = solve_linearized(pb, r.state, h);
  const SecondFormTerms t = lagrangian_second_form(pb, r.state, r.adjoint, lin.zeta, lin.mu, h);
  EXPECT_NE(t.viscosity_mixed, 0.0);
  EXPECT_NE(t.transport_mixed, 0.0);
  EXPECT_NEAR(t.total() - t.diagonal(), t.viscosity_mixed + t.transport_mixed, 1e-15 * std::abs(t.total()) + 1e-300);
  EXPECT_NEAR(t.tracking_u, l2_norm(pb, lin.zeta) * l2_norm(pb, lin.zeta), 1e-12);
}

TEST(Threshold, ArithmeticWithUnitConstants) {
  ThresholdBounds b{1.0, 1.0, 1.0, 1.0};
  DiagnosticsConfig c;
  c.C6 = c.C3 = c.C4 = c.C2r = 1.0;
  const PhysicalModel m = default_boussinesq_model();
  const ThresholdReport pass = lambda_threshold(m, 4.0, b, c, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(pass.threshold, 3.0);
  EXPECT_TRUE(pass.verdict);
  EXPECT_FALSE(lambda_threshold(m, 2.0, b, c, 1.0, 1.0).verdict);
  EXPECT_NE(pass.text().find("ADVISORY"), std::string::npos);
  c.C2r = 2.0;
  EXPECT_DOUBLE_EQ(lambda_threshold(m, 2.0, b, c, 1.0, 1.0).threshold, 1.5);
}

TEST(Probe, DeterministicForSeed) {
  const FlowProblem pb = coupled_problem(4, 1e-2);
  const OptimizationResult r = point(pb, ControlField::uniform(pb.num_controls(), 0.0, -1.0, 1.0));
  const CurvatureProbe a = ssc_curvature_probe(pb, r, 1e-3, 4, 21);
  const CurvatureProbe b = ssc_curvature_probe(pb, r, 1e-3, 4, 21);
  ASSERT_EQ(a.results.size(), b.results.size());
  for (std::size_t i = 0; i < a.results.size(); ++i) EXPECT_EQ(a.results[i].l_ww, b.results[i].l_ww);
  EXPECT_EQ(a.min_sigma, b.min_sigma);
  EXPECT_NE(a.verdict().find("not a certificate"), std::string::npos);
}

TEST(Probe, DegenerateWhenEverythingIsActive) {
  const FlowProblem pb(4, default_boussinesq_model());
  const ControlField U = ControlField::uniform(pb.num_controls(), 1.0, -1.0, 1.0);
  OptimizationResult r = point(pb, U);
  r.adjoint = constant_adjoint(pb, 0.5);
  const CurvatureProbe p = ssc_curvature_probe(pb, r, 1e-6, 5, 1);
  EXPECT_TRUE(p.degenerate);
  EXPECT_EQ(p.active_count, pb.num_controls());
  EXPECT_EQ(p.verdict().find("SSC witnessed"), std::string::npos);
}

TEST(Growth, ZeroRadiusSamplesAreExcluded) {
  const FlowProblem pb(4, default_boussinesq_model());
  const OptimizationResult r = point(pb, ControlField::uniform(pb.num_controls(), 0.0, 0.0, 0.0));
  const GrowthReport g = quadratic_growth_check(pb, r, 0.1, 5, 3);
  EXPECT_EQ(g.excluded, 5);
  EXPECT_TRUE(g.samples.empty());
}
