#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "ddflow/types.hpp"

namespace ddflow {

/// Temperature-dependent viscosity nu(T) and its first three derivatives.
struct ViscosityModel {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> d1, d2, d3;
  double lower = 0.0;            ///< nu_1
  double upper = 0.0;            ///< nu_2
  double lipschitz = 0.0;        ///< gamma_nu
  double d2_bound = 0.0;         ///< sup |nu_TT|
};

/// Hessian of each output component: hessian[k](a, b) = d^2 F_k / dy_a dy_b.
using BuoyancyHessian = std::array<Mat2, 2>;
/// third[k][a](b, c) = d^3 F_k / dy_a dy_b dy_c.
using BuoyancyThird = std::array<std::array<Mat2, 2>, 2>;

/// Buoyancy F(y) for the scalar pair y = (T, S).
struct BuoyancyModel {
  std::string name;
  std::function<Vec2(const Vec2&)> value;
  std::function<Mat2(const Vec2&)> jacobian;  ///< (F_y)_{ka} = dF_k/dy_a
  std::function<BuoyancyHessian(const Vec2&)> hessian;
  std::function<BuoyancyThird(const Vec2&)> third;
  double lipschitz = 0.0;  ///< gamma_F
  double growth = 0.0;     ///< C_F
  double hessian_bound = 0.0;
};

/// Coefficients and data of the controlled doubly diffusive flow problem.
struct PhysicalModel {
  Mat2 kinv = Mat2::Identity();  ///< inverse permeability (constant, symmetric)
  Mat2 diffusion = Mat2::Identity();
  ViscosityModel viscosity;
  BuoyancyModel buoyancy;
  double lambda = 1e-2;

  VectorFunction u_desired = [](const Vec2&) { return Vec2::Zero(); };
  VectorFunction y_desired = [](const Vec2&) { return Vec2::Zero(); };
  VectorFunction y_boundary = [](const Vec2&) { return Vec2::Zero(); };
  /// Volumetric sources, used only for manufactured-solution studies.
  VectorFunction f_u;
  VectorFunction f_y;

  double alpha1() const;  ///< smallest eigenvalue of kinv
  double alpha2() const;  ///< smallest eigenvalue of sym(D)

  /// Re-checks every structural assumption on sampled points; throws
  /// ModelViolation naming the first violated one.
  void validate() const;
};

ViscosityModel make_constant_viscosity(double nu0);
/// nu(T) = nu0 (1 + gamma tanh T), 0 <= gamma < 1.
ViscosityModel make_tanh_viscosity(double nu0, double gamma);
/// F(y) = (0, gT T + gS S).
BuoyancyModel make_linear_buoyancy(double gT, double gS);
/// F(y) = (0, gT sin T + gS S); bounded nonzero second derivative.
BuoyancyModel make_sine_buoyancy(double gT, double gS);

/// Registry lookup: "constant" | "tanh" and "linear" | "sine".
ViscosityModel make_viscosity(const std::string& name, double nu0, double gamma);
BuoyancyModel make_buoyancy(const std::string& name, double gT, double gS);
std::vector<std::string> viscosity_names();
std::vector<std::string> buoyancy_names();

struct BoussinesqParams {
  double nu0 = 1.0;
  double gamma = 0.5;
  double g_T = 1.0;
  double g_S = 0.5;
  std::string viscosity = "tanh";
  std::string buoyancy = "linear";
  Mat2 kinv = Mat2::Identity();
  Mat2 diffusion = Mat2::Identity();
  double lambda = 1e-2;
};

/// Builds and validates a model. Rejects gamma >= 1 (nu_1 would vanish).
PhysicalModel default_boussinesq_model(const BoussinesqParams& params = {});

/// Surrogates for the embedding constants of the well-posedness and
/// second-order estimates. The domain is fixed to the unit square, so
/// C_{2,r} = 1 (Hoelder with |Omega| = 1) and the Poincare constant is
/// 1/(sqrt(2) pi) (first Dirichlet eigenvalue 2 pi^2); all others default
/// to 1 and are user-overridable.
struct DiagnosticsConfig {
  double C6 = 1.0;
  double C3 = 1.0;
  double Cgn = 1.0;
  double Cp2 = 1.0;
  double C4 = 1.0;
  double C2r = 1.0;
  double poincare = 0.22507907903927651;
  bool advisory = true;

  void validate() const;
};

struct StateNorms {
  double Mu = 0.0;  ///< ||u||_1
  double My = 0.0;  ///< ||y||_1
  double M = 0.0;   ///< surrogate for the H^{3/2+delta} bound
};

struct SmallnessReport {
  StateNorms norms;
  double alpha_a = 0.0;
  double alpha_hat_a = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool verdict = false;
  std::string text() const;
};

/// Evaluates the small-data condition
///   alpha_a > C6 C3 (gamma_nu Cp2 Cgn M My / alpha_hat + Mu + gamma_F My / alpha_hat)
/// with alpha_a the coercivity constant of a(y; ., .) on H^1_0 and
/// alpha_hat = alpha_2. Advisory only: the constants are surrogates.
SmallnessReport check_smallness(const PhysicalModel& model, const StateNorms& norms,
                                const DiagnosticsConfig& config);

}  // namespace ddflow
