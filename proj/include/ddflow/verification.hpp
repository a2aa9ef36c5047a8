#pragma once

#include <cstdint>
#include <vector>

#include "ddflow/optimizer.hpp"

namespace ddflow {

/// Seeded directions with entries uniform in [-1, 1], control layout.
std::vector<Vector> random_directions(int size, int count, std::uint64_t seed);

struct GradientCheckRow {
  int direction = 0;
  double t = 0.0;
  double finite_difference = 0.0;  ///< (j(U + t h) - j(U - t h)) / 2t
  double analytic = 0.0;           ///< (grad, h)_0
  double rel_error = 0.0;
};

struct GradientCheck {
  std::vector<GradientCheckRow> rows;
  double max_rel_error = 0.0;  ///< at the smallest step
  double min_order = 0.0;      ///< smallest observed order between consecutive steps
  bool passed = false;
};

/// Central-difference Taylor test of the reduced gradient. Steps must be
/// decreasing; passes if the error at the last step is <= tol and every
/// observed order is >= min_order.
GradientCheck check_gradient(const FlowProblem& problem, const Vector& control, const std::vector<Vector>& directions,
                             const std::vector<double>& steps, double tol = 1e-5, double min_order = 1.9);

struct DualityRow {
  double lhs = 0.0;  ///< (zeta, u - u_d) + (mu, y - y_d)
  double rhs = 0.0;  ///< (h, phi)
  double rel_error = 0.0;
};

struct DualityCheck {
  std::vector<DualityRow> rows;
  double max_rel_error = 0.0;
  bool passed = false;
};

DualityCheck check_duality(const FlowProblem& problem, const StateFields& state, const std::vector<Vector>& directions,
                           double tol = 1e-8);

struct OrderRow {
  double t = 0.0;
  double error = 0.0;
};

struct OrderCheck {
  std::vector<OrderRow> rows;
  double min_order = 0.0;
  bool passed = false;
};

/// ||G(U + t h) - G(U) - t G'(U) h||_1 for decreasing t.
OrderCheck check_linearization_order(const FlowProblem& problem, const Vector& control, const Vector& h,
                                     const std::vector<double>& steps, double min_order = 1.9);

struct StabilityRow {
  double gap_l43 = 0.0;  ///< ||U1 - U2||_{4/3}
  double response = 0.0; ///< ||u1 - u2||_1 + ||y1 - y2||_1
  double ratio = 0.0;
};

struct StabilityCheck {
  std::vector<StabilityRow> rows;
  double spread = 0.0;  ///< max ratio / min ratio
  bool passed = false;
};

/// Ratio of state to control differences for U2 = U1 + s h over the scales s.
StabilityCheck check_stability_ratio(const FlowProblem& problem, const Vector& control, const Vector& h,
                                     const std::vector<double>& scales, double max_spread = 10.0);

struct MmsRow {
  int n = 0;
  DiscretizationErrors errors;
  int newton_iterations = 0;
  DiscretizationErrors orders;  ///< against the previous level (zero on the first)
};

struct MmsStudy {
  std::vector<MmsRow> rows;
  bool passed = false;  ///< every observed order: u_l2 >= 2.7, others >= 1.8
};

MmsStudy run_mms_study(const PhysicalModel& base, const ManufacturedSolution& exact, const std::vector<int>& levels,
                       const NewtonOptions& newton = {});

}  // namespace ddflow
