#include <gtest/gtest.h>

#include <cmath>

#include "ddflow/errors.hpp"
#include "ddflow/model.hpp"

using namespace ddflow;

TEST(Viscosity, ConstantWhenGammaZero) {
  const ViscosityModel v = make_tanh_viscosity(2.0, 0.0);
  for (double T : {-3.0, 0.0, 0.7, 5.0}) {
    EXPECT_EQ(v.value(T), 2.0);
    EXPECT_EQ(v.d1(T), 0.0);
  }
}

TEST(Viscosity, TanhRange) {
  const ViscosityModel v = make_tanh_viscosity(1.0, 0.5);
  EXPECT_DOUBLE_EQ(v.lower, 0.5);
  EXPECT_DOUBLE_EQ(v.upper, 1.5);
  for (double T = -10.0; T <= 10.0; T += 0.25) {
    EXPECT_GE(v.value(T), v.lower);
    EXPECT_LE(v.value(T), v.upper);
  }
}

TEST(Viscosity, DerivativesMatchCentralDifferences) {
  const ViscosityModel v = make_tanh_viscosity(1.3, 0.4);
  const double h = 1e-5;
  for (double T : {-1.5, -0.2, 0.0, 0.3, 2.0}) {
    EXPECT_NEAR(v.d1(T), (v.value(T + h) - v.value(T - h)) / (2 * h), 1e-9);
    EXPECT_NEAR(v.d2(T), (v.d1(T + h) - v.d1(T - h)) / (2 * h), 1e-9);
    EXPECT_NEAR(v.d3(T), (v.d2(T + h) - v.d2(T - h)) / (2 * h), 1e-8);
    EXPECT_LE(std::abs(v.d2(T)), v.d2_bound + 1e-15);
  }
}

TEST(Viscosity, RejectsDegenerateParameters) {
  EXPECT_THROW(make_tanh_viscosity(1.0, 1.0), ModelViolation);
  EXPECT_THROW(make_tanh_viscosity(0.0, 0.1), ModelViolation);
  EXPECT_THROW(make_viscosity("cubic", 1.0, 0.1), InvalidInput);
}

TEST(Buoyancy, ZeroCoefficientsDecouple) {
  const BuoyancyModel f = make_linear_buoyancy(0.0, 0.0);
  EXPECT_EQ(f.value(Vec2(3.0, -2.0)), Vec2::Zero());
}

TEST(Buoyancy, JacobianAndHessianMatchFiniteDifferences) {
  const BuoyancyModel f = make_sine_buoyancy(2.0, 0.7);
  const double h = 1e-6;
  const Vec2 y(0.4, -1.1);
  for (int a = 0; a < 2; ++a) {
    Vec2 e = Vec2::Zero();
    e[a] = h;
    const Vec2 fd = (f.value(y + e) - f.value(y - e)) / (2 * h);
    EXPECT_NEAR((f.jacobian(y).col(a) - fd).norm(), 0.0, 1e-9);
    const Mat2 dJ = (f.jacobian(y + e) - f.jacobian(y - e)) / (2 * h);
    const BuoyancyHessian H = f.hessian(y);
    for (int k = 0; k < 2; ++k)
      for (int b = 0; b < 2; ++b) EXPECT_NEAR(H[k](b, a), dJ(k, b), 1e-8);
  }
}

TEST(PhysicalModel, DefaultValidates) {
  const PhysicalModel m = default_boussinesq_model();
  EXPECT_NO_THROW(m.validate());
  EXPECT_DOUBLE_EQ(m.alpha1(), 1.0);
  EXPECT_DOUBLE_EQ(m.alpha2(), 1.0);
}

TEST(PhysicalModel, RejectsIndefiniteCoefficients) {
  BoussinesqParams p;
  p.diffusion << 1.0, 3.0, -3.5, 1.0;  // sym part is still positive definite
  EXPECT_NO_THROW(default_boussinesq_model(p));
  p.diffusion << 1.0, 3.0, 3.0, 1.0;
  EXPECT_THROW(default_boussinesq_model(p), ModelViolation);
  BoussinesqParams q;
  q.kinv << 1.0, 0.0, 0.0, -0.1;
  EXPECT_THROW(default_boussinesq_model(q), ModelViolation);
  BoussinesqParams l;
  l.lambda = 0.0;
  EXPECT_THROW(default_boussinesq_model(l), ModelViolation);
}

TEST(Smallness, ZeroDataHolds) {
  BoussinesqParams p;
  p.gamma = 0.0;
  p.g_T = p.g_S = 0.0;
  const SmallnessReport r = check_smallness(default_boussinesq_model(p), StateNorms{}, DiagnosticsConfig{});
  EXPECT_GT(r.alpha_a, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
  EXPECT_TRUE(r.verdict);
}

TEST(Smallness, FailsOnceMuExceedsAlpha) {
  BoussinesqParams p;
  p.gamma = 0.0;
  p.g_T = p.g_S = 0.0;
  const PhysicalModel m = default_boussinesq_model(p);
  StateNorms n;
  n.Mu = 0.5;
  const SmallnessReport small = check_smallness(m, n, DiagnosticsConfig{});
  n.Mu = 2.0;
  const SmallnessReport large = check_smallness(m, n, DiagnosticsConfig{});
  EXPECT_TRUE(small.verdict);
  EXPECT_FALSE(large.verdict);
  EXPECT_EQ(large.norms.Mu, 2.0);
  EXPECT_NE(large.text().find("ADVISORY"), std::string::npos);
}

TEST(Smallness, ExactCoercivityConstant) {
  // a1 = 1, nu1 = 1: alpha_a = max(1, 1 / (1 + 1/(2 pi^2))) = 1
  BoussinesqParams p;
  p.gamma = 0.0;
  EXPECT_DOUBLE_EQ(check_smallness(default_boussinesq_model(p), StateNorms{}, DiagnosticsConfig{}).alpha_a, 1.0);
  // a1 = 0.01, nu1 = 1: alpha_a = 1 / (1 + C_P^2)
  p.kinv = 0.01 * Mat2::Identity();
  const double cp = 1.0 / (std::sqrt(2.0) * M_PI);
  EXPECT_NEAR(check_smallness(default_boussinesq_model(p), StateNorms{}, DiagnosticsConfig{}).alpha_a,
              1.0 / (1.0 + cp * cp), 1e-15);
}
