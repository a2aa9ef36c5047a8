// Property-based acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ddflow/assembly.hpp"
#include "ddflow/config.hpp"
#include "ddflow/ssc.hpp"
#include "ddflow/verification.hpp"

using namespace ddflow;
namespace fs = std::filesystem;

namespace {

fs::path config_dir = DDFLOW_CONFIG_DIR;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

RunConfig load(const std::string& name) { return parse_config(config_dir / name); }

Vector config_control(const FlowProblem& pb, const RunConfig& c) {
  const Vector U = c.control_scale * random_directions(pb.num_controls(), 1, c.seed).front();
  return clamp(U, Vector::Constant(U.size(), c.lower), Vector::Constant(U.size(), c.upper));
}

std::vector<Vector> config_directions(const FlowProblem& pb, const RunConfig& c, int count) {
  auto dirs = random_directions(pb.num_controls(), count, c.seed + 1);
  for (auto& h : dirs) h *= c.direction_scale;
  return dirs;
}

// Converged KKT point of the SSC fixture, shared by criteria 10-12.
struct DeskFixture {
  RunConfig config;
  FlowProblem problem;
  OptimizationResult kkt;
};

const DeskFixture& desk() {
  static const DeskFixture f = [] {
    RunConfig c = load("ssc_desk.ini");
    FlowProblem pb = build_problem(c);
    OptimizationResult kkt = optimize(pb, initial_control(pb, c), optimize_options(c));
    return DeskFixture{c, pb, kkt};
  }();
  return f;
}

Outcome mms() {
  const RunConfig c = load("mms.ini");
  const auto t0 = std::chrono::steady_clock::now();
  const MmsStudy s = run_mms_study(default_boussinesq_model(c.model), ManufacturedSolution{}, c.mms_levels,
                                   newton_options(c));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::string d;
  for (std::size_t i = 1; i < s.rows.size(); ++i) {
    const auto& o = s.rows[i].orders;
    char buf[160];
    std::snprintf(buf, sizeof buf, "n=%d orders u_l2 %.2f u_h1 %.2f p_l2 %.2f y_h1 %.2f; ", s.rows[i].n, o.u_l2,
                  o.u_h1, o.p_l2, o.y_h1);
    d += buf;
  }
  d += fmt("%.1f s", secs);
  return {s.passed && secs <= 300.0, d};
}

Outcome jacobian_fd() {
  const RunConfig c = load("gradient.ini");
  const FlowProblem pb = build_problem(c);
  const Vector U = config_control(pb, c);
  const Vector x = pack(pb, solve_state(pb, U, newton_options(c)).state);
  const Eigen::MatrixXd J(newton_jacobian(pb, x, 1.0, false));
  std::mt19937_64 rng(c.seed);
  std::uniform_int_distribution<int> col(0, static_cast<int>(x.size()) - 1);
  const double h = 1e-6;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const int j = col(rng);
    Vector xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Vector fd = (state_residual(pb, xp, U, 1.0, false) - state_residual(pb, xm, U, 1.0, false)) / (2 * h);
    const double scale = std::max(J.col(j).norm(), 1e-300);
    worst = std::max(worst, (fd - J.col(j)).norm() / scale);
  }
  return {worst <= 1e-4, fmt("max relative column error %.3e over 20 columns", worst)};
}

Outcome transpose() {
  const RunConfig c = load("gradient.ini");
  const FlowProblem pb = build_problem(c);
  const StateFields s = solve_state(pb, config_control(pb, c), newton_options(c)).state;
  const TransposeReport r = check_transpose_consistency(pb, s);
  return {r.passed, fmt("max deviation %.3e", r.max_deviation) + fmt(" (max entry %.3e)", r.max_entry)};
}

Outcome duality() {
  RunConfig c = load("gradient.ini");
  c.n = 16;
  const FlowProblem pb = build_problem(c);
  const StateFields s = solve_state(pb, config_control(pb, c), newton_options(c)).state;
  const DualityCheck d = check_duality(pb, s, config_directions(pb, c, 10), 1e-8);
  return {d.passed && d.rows.size() == 10, fmt("max relative error %.3e over 10 directions, n = 16", d.max_rel_error)};
}

Outcome gradient_taylor() {
  const RunConfig c = load("gradient.ini");
  const FlowProblem pb = build_problem(c);
  const GradientCheck g =
      check_gradient(pb, config_control(pb, c), config_directions(pb, c, c.check_directions), {1e-2, 1e-3, 1e-4});
  return {g.passed, fmt("relative error at t=1e-4 %.3e", g.max_rel_error) + fmt(", min order %.3f", g.min_order)};
}

Outcome frechet() {
  const RunConfig c = load("gradient.ini");
  const FlowProblem pb = build_problem(c);
  const OrderCheck o =
      check_linearization_order(pb, config_control(pb, c), config_directions(pb, c, 1).front(), {1e-1, 1e-2, 1e-3});
  return {o.passed, fmt("min observed order %.3f", o.min_order)};
}

Outcome projection() {
  bool ok = true;
  // examples: inside unchanged, U = 2 on [-1, 1], -phi/lambda = -0.5 on [0, 1]
  Vector inside(3), lo(3), hi(3);
  inside << -0.5, 0.0, 0.9;
  lo.setConstant(-1.0);
  hi.setConstant(1.0);
  ok = ok && clamp(inside, lo, hi) == inside;
  ok = ok && clamp(Vector::Constant(3, 2.0), lo, hi) == Vector::Constant(3, 1.0);
  ok = ok && clamp(Vector::Constant(3, -0.5), Vector::Zero(3), Vector::Ones(3)) == Vector::Zero(3);

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  const int m = 512;
  double worst_expansion = 0.0;
  for (int k = 0; k < 100; ++k) {
    Vector a(m), b(m), l(m), u(m);
    for (int i = 0; i < m; ++i) {
      const double p = d(rng), q = d(rng);
      l[i] = std::min(p, q);
      u[i] = std::max(p, q);
      a[i] = 2 * d(rng);
      b[i] = 2 * d(rng);
    }
    const Vector pa = clamp(a, l, u), pb = clamp(b, l, u);
    ok = ok && clamp(pa, l, u) == pa;
    for (int i = 0; i < m; ++i) {
      ok = ok && pa[i] >= l[i] && pa[i] <= u[i];
      ok = ok && std::abs(pa[i] - pb[i]) <= std::abs(a[i] - b[i]);
      if (a[i] <= b[i]) ok = ok && pa[i] <= pb[i];
    }
    worst_expansion = std::max(worst_expansion, (pa - pb).norm() - (a - b).norm());
    ok = ok && (pa - pb).norm() <= (a - b).norm();
  }
  return {ok, "clamp examples, idempotence, nonexpansiveness, monotonicity on 100 fields" +
                  fmt(" (max ||Pa-Pb|| - ||a-b|| = %.3e)", worst_expansion)};
}

Outcome inverse_crime() {
  std::string d;
  bool ok = true;
  {
    const RunConfig c = load("inverse_crime.ini");
    const FlowProblem pb = build_problem(c);
    const OptimizationResult r = optimize(pb, initial_control(pb, c), optimize_options(c));
    const auto& last = r.report.history.back();
    const double gap = control_norm(pb, r.control.values - build_ustar(pb, c), 2.0);
    ok = ok && r.report.termination == Termination::Converged && last.vi_residual <= 1e-6 && last.iteration <= 200;
    char buf[160];
    std::snprintf(buf, sizeof buf, "wide: %d iterations, vi %.3e, ||U-U*|| %.3e; ", last.iteration,
                  last.vi_residual, gap);
    d += buf;
  }
  {
    const RunConfig c = load("inverse_crime_active.ini");
    const FlowProblem pb = build_problem(c);
    const OptimizationResult r = optimize(pb, initial_control(pb, c), optimize_options(c));
    const Vector cellwise = vi_residual_cellwise(pb, r.control, r.adjoint);
    int clipped = 0;
    for (int i = 0; i < r.control.size(); ++i)
      if (r.control.values[i] == r.control.lower[i] || r.control.values[i] == r.control.upper[i]) ++clipped;
    ok = ok && r.report.termination == Termination::Converged && cellwise.maxCoeff() <= 1e-8 && clipped > 0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "active: %d iterations, %d components on a bound, max cellwise residual %.3e",
                  r.report.history.back().iteration, clipped, cellwise.maxCoeff());
    d += buf;
  }
  return {ok, d};
}

Outcome skew() {
  BoussinesqParams bp;
  const FlowProblem pb(8, default_boussinesq_model(bp));
  const int n = 2 * pb.layout().n2;
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  auto draw = [&] {
    Vector v(n);
    for (auto& e : v) e = g(rng);
    return v;
  };
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vector w = draw(), v = draw(), s = draw();
    const SparseMatrix C = assemble_c_skew(pb.velocity(), w);
    const SparseMatrix Cy = assemble_cy_skew(pb.pair(), w);
    const double cv = v.dot(C * v), cs = s.dot(Cy * s);
    const double scale_v = v.cwiseAbs().dot(C.cwiseAbs() * v.cwiseAbs());
    const double scale_s = s.cwiseAbs().dot(Cy.cwiseAbs() * s.cwiseAbs());
    worst = std::max({worst, std::abs(cv) / scale_v, std::abs(cs) / scale_s});
  }
  return {worst <= 1e-12, fmt("max |c(w,v,v)| / scale %.3e over 100 triples", worst)};
}

Outcome second_form() {
  const DeskFixture& f = desk();
  const FlowProblem& pb = f.problem;
  const int n2 = pb.layout().n2;
  const Vector xbar = pack(pb, f.kkt.state);
  const std::vector<bool> fixed = pb.velocity().dirichlet_mask();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    Vector z(2 * n2), mu(2 * n2), h(pb.num_controls());
    for (int i = 0; i < 2 * n2; ++i) {
      z[i] = fixed[i] ? 0.0 : u(rng);
      mu[i] = fixed[i] ? 0.0 : u(rng);
    }
    for (auto& e : h) e = u(rng);
    Vector dir = Vector::Zero(xbar.size());
    dir.segment(pb.layout().u(), 2 * n2) = z;
    dir.segment(pb.layout().y(), 2 * n2) = mu;
    auto L = [&](double s) { return lagrangian_value(pb, xbar + s * dir, f.kkt.control.values + s * h, f.kkt.adjoint); };
    const double s = 1e-2;
    const double fd = (-L(2 * s) + 16 * L(s) - 30 * L(0) + 16 * L(-s) - L(-2 * s)) / (12 * s * s);
    const double form = lagrangian_second_form(pb, f.kkt.state, f.kkt.adjoint, z, mu, h).total();
    worst = std::max(worst, std::abs(fd - form) / std::abs(fd));
  }
  return {worst <= 1e-4, fmt("max relative error %.3e over 10 directions", worst)};
}

Outcome ssc() {
  const DeskFixture& f = desk();
  const RunConfig& c = f.config;
  const double lambda = f.problem.model().lambda;
  const double eps = default_epsilon(f.problem, f.kkt.control.values, f.kkt.adjoint, lambda);
  const CurvatureProbe a = ssc_curvature_probe(f.problem, f.kkt, eps, 50, c.seed);
  const CurvatureProbe b = ssc_curvature_probe(f.problem, f.kkt, eps, 50, c.seed);
  const GrowthReport g = quadratic_growth_check(f.problem, f.kkt, 0.1, 100, c.seed + 1, newton_options(c));
  const GrowthReport g2 = quadratic_growth_check(f.problem, f.kkt, 0.1, 100, c.seed + 1, newton_options(c));
  const bool deterministic = a.min_sigma == b.min_sigma && g.theta_est == g2.theta_est;
  const bool ok = !a.degenerate && a.results.size() == 50 && a.min_sigma > 0.0 && g.passed && g.theta_est > 0.0 &&
                  deterministic && f.kkt.report.termination == Termination::Converged;
  char buf[200];
  std::snprintf(buf, sizeof buf, "lambda %.3g: min sigma %.4g (%d of %d active), theta_est %.4g over %zu samples%s",
                lambda, a.min_sigma, a.active_count, f.kkt.control.size(), g.theta_est, g.samples.size(),
                deterministic ? ", deterministic" : ", NOT deterministic");
  return {ok, buf};
}

Outcome active_estimate() {
  const DeskFixture& f = desk();
  const double lambda = f.problem.model().lambda;
  const double eps = default_epsilon(f.problem, f.kkt.control.values, f.kkt.adjoint, lambda);
  const ActiveSetMask mask = strongly_active_set(f.problem, f.kkt.control.values, f.kkt.adjoint, lambda, eps);
  std::mt19937_64 rng(f.config.seed + 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int passed = 0;
  for (int k = 0; k < 20; ++k) {
    Vector U(f.kkt.control.size());
    for (int i = 0; i < U.size(); ++i) {
      const double lo = f.kkt.control.lower[i], hi = f.kkt.control.upper[i];
      U[i] = lo + u(rng) * (hi - lo);
    }
    passed += verify_active_estimate(f.problem, U, f.kkt.control.values, f.kkt.adjoint, lambda, mask).passed;
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "%d of 20 admissible controls, %d strongly active components", passed, mask.count());
  return {passed == 20 && mask.count() > 0, buf};
}

Outcome stability() {
  const RunConfig c = load("gradient.ini");
  const FlowProblem pb = build_problem(c);
  const StabilityCheck s =
      check_stability_ratio(pb, config_control(pb, c), config_directions(pb, c, 1).front(), {1.0, 1e-1, 1e-2, 1e-3});
  return {s.passed, fmt("ratio spread %.4f over 3 decades", s.spread)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) config_dir = argv[1];
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"mms convergence", mms},
      {"jacobian finite differences", jacobian_fd},
      {"adjoint is jacobian transpose", transpose},
      {"duality identity", duality},
      {"reduced gradient taylor test", gradient_taylor},
      {"linearization order", frechet},
      {"projection laws", projection},
      {"inverse crime recovery", inverse_crime},
      {"skew form exactness", skew},
      {"second form vs finite differences", second_form},
      {"ssc probe and quadratic growth", ssc},
      {"strongly active estimate", active_estimate},
      {"stability ratio", stability},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.passed;
    std::printf("%s %2zu %s: %s [%.1f s]\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
