#include "ddflow/ssc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "ddflow/assembly.hpp"

namespace ddflow {
namespace {

Mat2 gradient(const CellValues& cv, const Vector& field, int n, int q) {
  Mat2 g;
  g.row(0) = cv.p2_gradient(field, 0, q).transpose();
  g.row(1) = cv.p2_gradient(field, n, q).transpose();
  return g;
}

Vec2 value(const CellValues& cv, const Vector& field, int n, int q) {
  return {cv.p2_value(field, 0, q), cv.p2_value(field, n, q)};
}

void check_field(const Vector& v, int n, const char* what) {
  if (v.size() != n) {
    std::ostringstream msg;
    msg << what << ": field has " << v.size() << " entries, expected " << n;
    throw InvalidInput(msg.str());
  }
}

}  // namespace

int ActiveSetMask::count() const { return static_cast<int>(std::count(mask.begin(), mask.end(), true)); }

ActiveSetMask strongly_active_set(const FlowProblem& problem, const Vector& U, const AdjointFields& adjoint,
                                  double lambda, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidInput("strongly_active_set: epsilon must be positive");
  check_field(U, problem.num_controls(), "strongly_active_set");
  const Vector g = lambda * U + cell_average(problem, adjoint.phi);
  ActiveSetMask m{epsilon, std::vector<bool>(g.size())};
  for (int i = 0; i < g.size(); ++i) m.mask[i] = std::abs(g[i]) > epsilon;
  return m;
}

double default_epsilon(const FlowProblem& problem, const Vector& U, const AdjointFields& adjoint, double lambda) {
  check_field(U, problem.num_controls(), "default_epsilon");
  const Vector phi = cell_average(problem, adjoint.phi);
  // floor keeps round-off of an interior optimum out of the active set
  const double floor = 1e-10 * (lambda * U.cwiseAbs().maxCoeff() + phi.cwiseAbs().maxCoeff());
  return std::max(1e-3 * (lambda * U + phi).cwiseAbs().maxCoeff(), floor);
}

ActiveEstimateReport verify_active_estimate(const FlowProblem& problem, const Vector& U, const Vector& Ubar,
                                            const AdjointFields& adjoint, double lambda, const ActiveSetMask& mask) {
  check_field(U, problem.num_controls(), "verify_active_estimate");
  check_field(Ubar, problem.num_controls(), "verify_active_estimate");
  if (static_cast<int>(mask.mask.size()) != U.size()) throw InvalidInput("verify_active_estimate: mask size mismatch");
  const Vector g = lambda * Ubar + cell_average(problem, adjoint.phi);
  const int nc = problem.control().scalar_dofs;
  ActiveEstimateReport r;
  for (int i = 0; i < U.size(); ++i) {
    if (!mask.mask[i]) continue;
    const double a = problem.cell_areas()[i % nc];
    r.lhs += a * g[i] * (U[i] - Ubar[i]);
    r.rhs += a * mask.epsilon * std::abs(U[i] - Ubar[i]);
  }
  r.passed = r.lhs >= r.rhs - 1e-12 * std::max(std::abs(r.lhs), std::abs(r.rhs));
  return r;
}

Vector pack_adjoint(const FlowProblem& problem, const AdjointFields& adjoint) {
  StateFields s{adjoint.phi, adjoint.xi, adjoint.eta, adjoint.multiplier};
  return pack(problem, s);
}

double lagrangian_value(const FlowProblem& problem, const Vector& x, const Vector& control,
                        const AdjointFields& adjoint) {
  const double j = cost_terms(problem, unpack(problem, x), control).total();
  return j - pack_adjoint(problem, adjoint).dot(state_residual(problem, x, control));
}

double SecondFormTerms::total() const { return diagonal() + viscosity_mixed + transport_mixed; }

double SecondFormTerms::diagonal() const {
  return tracking_u + tracking_y + regularization + convection + viscosity_curvature + buoyancy;
}

SecondFormTerms lagrangian_second_form(const FlowProblem& problem, const StateFields& state,
                                       const AdjointFields& adjoint, const Vector& zeta, const Vector& mu,
                                       const Vector& h) {
  const int n = problem.layout().n2;
  check_field(zeta, 2 * n, "lagrangian_second_form");
  check_field(mu, 2 * n, "lagrangian_second_form");
  check_field(adjoint.phi, 2 * n, "lagrangian_second_form");
  check_field(adjoint.eta, 2 * n, "lagrangian_second_form");
  const PhysicalModel& m = problem.model();

  SecondFormTerms t;
  t.regularization = m.lambda * control_inner(problem, h, h);
  CellValues cv(problem.mesh(), triangle_rule(kAssemblyDegree));
  for (int c = 0; c < problem.mesh().num_cells(); ++c) {
    cv.reinit(c);
    for (int q = 0; q < cv.num_points(); ++q) {
      const double w = cv.jxw(q);
      const Vec2 z = value(cv, zeta, n, q), mv = value(cv, mu, n, q);
      const Vec2 phi = value(cv, adjoint.phi, n, q), eta = value(cv, adjoint.eta, n, q);
      const Vec2 y = value(cv, state.y, n, q);
      const Mat2 gz = gradient(cv, zeta, n, q), gmu = gradient(cv, mu, n, q);
      const Mat2 gphi = gradient(cv, adjoint.phi, n, q), geta = gradient(cv, adjoint.eta, n, q);
      const Mat2 gu = gradient(cv, state.u, n, q);
      const double T = y[0];

      t.tracking_u += w * z.squaredNorm();
      t.tracking_y += w * mv.squaredNorm();
      // skew forms: ((w.grad) a, b) = (grad a * w) . b
      const double c_u = 0.5 * ((gz * z).dot(phi) - (gphi * z).dot(z));
      const double c_y = 0.5 * ((gmu * z).dot(eta) - (geta * z).dot(mv));
      t.convection -= 2.0 * w * c_u;
      t.transport_mixed -= 2.0 * w * c_y;
      t.viscosity_curvature -= w * m.viscosity.d2(T) * mv[0] * mv[0] * (gu.array() * gphi.array()).sum();
      t.viscosity_mixed -= 2.0 * w * m.viscosity.d1(T) * mv[0] * (gz.array() * gphi.array()).sum();
      const BuoyancyHessian H = m.buoyancy.hessian(y);
      t.buoyancy += w * (phi[0] * mv.dot(H[0] * mv) + phi[1] * mv.dot(H[1] * mv));
    }
  }
  return t;
}

std::string CurvatureProbe::verdict() const {
  std::ostringstream out;
  if (degenerate) {
    out << "degenerate probe: every sampled direction vanishes on the strongly active set (epsilon " << epsilon
        << "); no verdict";
    return out.str();
  }
  out << "min sigma_est = " << min_sigma << " over " << results.size() << " directions: ";
  if (min_sigma > 0.0)
    out << "SSC witnessed on sampled subspace";
  else
    out << "SSC violated by a sampled direction";
  out << " (sampling check, not a certificate)";
  return out.str();
}

CurvatureProbe ssc_curvature_probe(const FlowProblem& problem, const OptimizationResult& kkt, double epsilon,
                                   int n_dirs, std::uint64_t seed) {
  if (n_dirs < 1) throw InvalidInput("ssc_curvature_probe: n_dirs must be positive");
  const ControlField& Ubar = kkt.control;
  const ActiveSetMask mask = strongly_active_set(problem, Ubar.values, kkt.adjoint, problem.model().lambda, epsilon);

  CurvatureProbe probe;
  probe.epsilon = epsilon;
  probe.active_count = mask.count();
  if (probe.active_count == Ubar.size()) {
    probe.degenerate = true;
    return probe;
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const StateLinearization lin(problem, kkt.state);
  std::vector<Vector> directions;
  for (int k = 0; k < n_dirs; ++k) {
    Vector h(Ubar.size());
    for (int i = 0; i < h.size(); ++i) {
      const double U = Ubar.lower[i] + unit(rng) * (Ubar.upper[i] - Ubar.lower[i]);
      h[i] = mask.mask[i] ? 0.0 : U - Ubar.values[i];
    }
    directions.push_back(std::move(h));
  }

  probe.min_sigma = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_dirs; ++k) {
    const Vector& h = directions[k];
    const double h43 = control_norm(problem, h, 4.0 / 3.0);
    if (!(h43 > 0.0)) continue;
    const LinearizedFields lf = lin.solve_linearized(h);
    CurvatureProbeResult r;
    r.direction = k;
    r.l_ww = lagrangian_second_form(problem, kkt.state, kkt.adjoint, lf.zeta, lf.mu, h).total();
    r.h43_squared = h43 * h43;
    r.sigma = r.l_ww / r.h43_squared;
    const double a = h1_norm(problem, lf.zeta), b = h1_norm(problem, lf.mu);
    r.response_h1_squared = a * a + b * b;
    probe.min_sigma = std::min(probe.min_sigma, r.sigma);
    probe.results.push_back(r);
  }
  if (probe.results.empty()) {
    probe.degenerate = true;
    probe.min_sigma = 0.0;
  }
  return probe;
}

ThresholdBounds estimate_threshold_bounds(const FlowProblem& problem, const OptimizationResult& kkt,
                                          const CurvatureProbe& probe) {
  ThresholdBounds b;
  b.M_phi = h1_norm(problem, kkt.adjoint.phi) + h1_norm(problem, kkt.adjoint.eta);
  const StateFields adj{kkt.adjoint.phi, kkt.adjoint.xi, kkt.adjoint.eta, kkt.adjoint.multiplier};
  b.M_bar = state_norms(problem, adj).M;
  b.M_hat = state_norms(problem, kkt.state).M;
  for (const auto& r : probe.results) b.M_psi = std::max(b.M_psi, r.response_h1_squared / r.h43_squared);
  return b;
}

std::string ThresholdReport::text() const {
  std::ostringstream out;
  out << "ADVISORY (surrogate constants) lambda threshold\n"
      << "  M_psi = " << bounds.M_psi << ", M_phi = " << bounds.M_phi << ", M_hat = " << bounds.M_hat
      << ", M_bar = " << bounds.M_bar << "\n"
      << "  C6 = " << config.C6 << ", C3 = " << config.C3 << ", C4 = " << config.C4 << ", C2r = " << config.C2r
      << ", C_Fyy = " << C_Fyy << ", C_nuTT = " << C_nuTT << "\n"
      << "  lambda = " << lambda << " vs threshold = " << threshold << ": "
      << (verdict ? "condition holds" : "condition not met") << "\n";
  return out.str();
}

ThresholdReport lambda_threshold(const PhysicalModel& model, double lambda, const ThresholdBounds& bounds,
                                 const DiagnosticsConfig& config, double C_Fyy, double C_nuTT) {
  config.validate();
  ThresholdReport r;
  r.bounds = bounds;
  r.config = config;
  r.lambda = lambda;
  r.C_Fyy = C_Fyy < 0.0 ? model.buoyancy.hessian_bound : C_Fyy;
  r.C_nuTT = C_nuTT < 0.0 ? model.viscosity.d2_bound : C_nuTT;
  r.threshold = (bounds.M_psi * bounds.M_phi * (config.C6 * config.C3 + r.C_Fyy * config.C4 * config.C4) +
                 r.C_nuTT * bounds.M_hat * bounds.M_bar * bounds.M_psi) /
                config.C2r;
  r.verdict = lambda > r.threshold;
  return r;
}

GrowthReport quadratic_growth_check(const FlowProblem& problem, const OptimizationResult& kkt, double radius,
                                    int n_samples, std::uint64_t seed, const NewtonOptions& newton) {
  if (!(radius > 0.0) || n_samples < 1) throw InvalidInput("quadratic_growth_check: invalid radius or sample count");
  const ControlField& Ubar = kkt.control;
  const Vector guess = pack(problem, kkt.state);
  NewtonOptions opts = newton;
  opts.min_iterations = std::max(opts.min_iterations, 1);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sym(-1.0, 1.0), unit(0.0, 1.0);
  GrowthReport rep;
  rep.radius = radius;
  rep.theta_est = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_samples; ++k) {
    Vector d(Ubar.size());
    for (int i = 0; i < d.size(); ++i) d[i] = sym(rng);
    const double scale = radius * (1.0 - unit(rng)) / control_norm(problem, d, 2.0);
    const Vector U = clamp(Ubar.values + scale * d, Ubar.lower, Ubar.upper);
    const Vector diff = U - Ubar.values;
    GrowthSample s;
    s.distance_l2 = control_norm(problem, diff, 2.0);
    s.distance_l43 = control_norm(problem, diff, 4.0 / 3.0);
    if (!(s.distance_l43 > 0.0)) {
      ++rep.excluded;
      continue;
    }
    const StateSolution sol = solve_state(problem, U, opts, guess);
    s.increase = cost_difference(problem, kkt.state, Ubar.values, sol.state, U);
    s.theta = s.increase / (s.distance_l43 * s.distance_l43);
    rep.theta_est = std::min(rep.theta_est, s.theta);
    rep.samples.push_back(s);
  }
  if (rep.samples.empty()) rep.theta_est = 0.0;
  rep.passed = !rep.samples.empty() && rep.theta_est > 0.0;
  return rep;
}

}  // namespace ddflow
