#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ddflow/optimizer.hpp"

namespace ddflow {

/// Cells (per component, control layout) where |lambda U_i + avg(phi)_i| > epsilon.
struct ActiveSetMask {
  double epsilon = 0.0;
  std::vector<bool> mask;
  int count() const;
};

/// Throws InvalidInput unless epsilon > 0.
ActiveSetMask strongly_active_set(const FlowProblem& problem, const Vector& U, const AdjointFields& adjoint,
                                  double lambda, double epsilon);

/// 1e-3 * max |lambda U + avg(phi)|, but at least 1e-10 (lambda max|U| + max|avg(phi)|).
double default_epsilon(const FlowProblem& problem, const Vector& U, const AdjointFields& adjoint, double lambda);

struct ActiveEstimateReport {
  double lhs = 0.0;  ///< sum over the mask of (lambda Ubar + phi)(U - Ubar), area weighted
  double rhs = 0.0;  ///< epsilon * ||U - Ubar||_{L^1} over the mask
  bool passed = false;
};

/// Checks lhs >= rhs (up to a relative round-off slack of 1e-12).
ActiveEstimateReport verify_active_estimate(const FlowProblem& problem, const Vector& U, const Vector& Ubar,
                                            const AdjointFields& adjoint, double lambda, const ActiveSetMask& mask);

/// Monolithic adjoint vector [phi, xi, multiplier, eta] in the state layout.
Vector pack_adjoint(const FlowProblem& problem, const AdjointFields& adjoint);

/// L = j(x, U) - Lambda . R(x, U) with R the constrained state residual.
double lagrangian_value(const FlowProblem& problem, const Vector& x, const Vector& control,
                        const AdjointFields& adjoint);

/// Contributions to the second derivative of the Lagrangian in the
/// direction (zeta, mu, h).
struct SecondFormTerms {
  double tracking_u = 0.0;           ///< ||zeta||^2
  double tracking_y = 0.0;           ///< ||mu||^2
  double regularization = 0.0;       ///< lambda ||h||^2
  double convection = 0.0;           ///< -2 c(zeta, zeta, phi)
  double viscosity_curvature = 0.0;  ///< -(nu_TT (mu_T)^2 grad u, grad phi)
  double buoyancy = 0.0;             ///< (F_yy (mu, mu), phi)
  double viscosity_mixed = 0.0;      ///< -2 (nu_T mu_T grad zeta, grad phi)
  double transport_mixed = 0.0;      ///< -2 c_y(zeta, mu, eta)

  double total() const;
  /// Block-diagonal part: total() without the two mixed (u, y) terms.
  double diagonal() const;
};

/// Quadrature evaluation of L_ww[(zeta, mu, h)]^2 at the state and adjoint.
SecondFormTerms lagrangian_second_form(const FlowProblem& problem, const StateFields& state,
                                       const AdjointFields& adjoint, const Vector& zeta, const Vector& mu,
                                       const Vector& h);

struct CurvatureProbeResult {
  int direction = 0;
  double l_ww = 0.0;
  double h43_squared = 0.0;     ///< ||h||_{4/3}^2
  double sigma = 0.0;           ///< l_ww / ||h||_{4/3}^2
  double response_h1_squared = 0.0;  ///< ||zeta||_1^2 + ||mu||_1^2
};

struct CurvatureProbe {
  double epsilon = 0.0;
  int active_count = 0;
  std::vector<CurvatureProbeResult> results;
  bool degenerate = false;  ///< every sampled direction vanished
  double min_sigma = 0.0;
  std::string verdict() const;
};

/// Samples directions h = (U - Ubar) with U uniform in the box, zeroed on the
/// strongly active set, solves the linearized system and evaluates the
/// second form. A positive minimum witnesses SSC on the sampled subspace
/// only; it is not a proof.
CurvatureProbe ssc_curvature_probe(const FlowProblem& problem, const OptimizationResult& kkt, double epsilon,
                                   int n_dirs, std::uint64_t seed);

struct ThresholdBounds {
  double M_psi = 0.0;
  double M_phi = 0.0;
  double M_hat = 0.0;
  double M_bar = 0.0;
};

/// Computable surrogates: M_phi = ||phi||_1 + ||eta||_1, M_bar = broken H^2
/// surrogate of the adjoint, M_hat = state regularity surrogate, M_psi =
/// largest sampled ||(zeta, mu)||_1^2 / ||h||_{4/3}^2 of the probe.
ThresholdBounds estimate_threshold_bounds(const FlowProblem& problem, const OptimizationResult& kkt,
                                          const CurvatureProbe& probe);

struct ThresholdReport {
  ThresholdBounds bounds;
  double C_Fyy = 0.0;
  double C_nuTT = 0.0;
  DiagnosticsConfig config;
  double lambda = 0.0;
  double threshold = 0.0;
  bool verdict = false;
  std::string text() const;
};

/// lambda > (1/C2r) (M_psi M_phi (C6 C3 + C_Fyy C4^2) + C_nuTT M_hat M_bar M_psi).
/// Advisory: the constants are surrogates. Negative C_Fyy / C_nuTT select the
/// bounds recorded in the model.
ThresholdReport lambda_threshold(const PhysicalModel& model, double lambda, const ThresholdBounds& bounds,
                                 const DiagnosticsConfig& config, double C_Fyy = -1.0, double C_nuTT = -1.0);

struct GrowthSample {
  double distance_l2 = 0.0;
  double distance_l43 = 0.0;
  double increase = 0.0;  ///< j(U) - j(Ubar)
  double theta = 0.0;
};

struct GrowthReport {
  double radius = 0.0;
  std::vector<GrowthSample> samples;
  int excluded = 0;  ///< samples with U == Ubar
  double theta_est = 0.0;
  bool passed = false;
};

/// Samples admissible U = P(Ubar + s d) with ||U - Ubar||_0 <= radius and
/// reports min (j(U) - j(Ubar)) / ||U - Ubar||_{4/3}^2.
GrowthReport quadratic_growth_check(const FlowProblem& problem, const OptimizationResult& kkt, double radius,
                                    int n_samples, std::uint64_t seed, const NewtonOptions& newton = {1e-12});

}  // namespace ddflow
