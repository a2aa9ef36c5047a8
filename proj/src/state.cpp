#include "ddflow/state.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ddflow/assembly.hpp"
#include "ddflow/linalg.hpp"

namespace ddflow {
namespace {

constexpr double kPi = std::numbers::pi;

void add_block(TripletList& t, const SparseMatrix& block, int r0, int c0, double scale = 1.0) {
  for (int r = 0; r < block.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(block, r); it; ++it)
      t.emplace_back(r0 + it.row(), c0 + it.col(), scale * it.value());
}

void zero_constrained(const FlowProblem& problem, Vector& r) {
  const auto& mask = problem.constrained();
  for (int i = 0; i < r.size(); ++i)
    if (mask[i]) r[i] = 0.0;
}

std::array<double, 3> equation_norms(const FlowProblem& problem, const Vector& r) {
  const DofLayout& L = problem.layout();
  return {r.segment(L.u(), 2 * L.n2).norm(), r.segment(L.p(), L.n1 + 1).norm(), r.segment(L.y(), 2 * L.n2).norm()};
}

Vector enforce_boundary(const FlowProblem& problem, Vector x) {
  const DofLayout& L = problem.layout();
  const auto& mask = problem.constrained();
  for (int i = 0; i < 2 * L.n2; ++i)
    if (mask[L.u() + i]) x[L.u() + i] = 0.0;
  for (int i = 0; i < 2 * L.n2; ++i)
    if (mask[L.y() + i]) x[L.y() + i] = problem.lifting()[i];
  return x;
}

}  // namespace

FlowProblem::FlowProblem(int n, PhysicalModel model) : model_(std::move(model)) {
  model_.validate();
  mesh_ = std::make_shared<const TriMesh>(build_unit_square_mesh(n));
  velocity_ = make_p2_space(*mesh_, 2);
  scalar_ = make_p2_space(*mesh_, 1);
  pair_ = make_p2_space(*mesh_, 2);
  pressure_ = make_p1_space(*mesh_);
  control_ = make_p0_space(*mesh_, 2);
  layout_ = DofLayout{scalar_.scalar_dofs, pressure_.scalar_dofs};
  cell_areas_ = mesh_->cell_areas();

  velocity_mass_ = assemble_mass(velocity_);
  pair_mass_ = velocity_mass_;
  stiffness_ = assemble_stiffness(velocity_);
  divergence_ = assemble_b(velocity_, pressure_);
  pressure_mean_ = assemble_pressure_mean(pressure_);
  control_coupling_ = assemble_control_coupling(velocity_, control_);
  ay_ = assemble_ay(pair_, model_);
  lifting_ = apply_lifting(pair_, model_.y_boundary);
  source_u_ = assemble_source(velocity_, model_.f_u);
  source_y_ = assemble_source(pair_, model_.f_y);
  u_target_ = interpolate(velocity_, model_.u_desired);
  y_target_ = interpolate(pair_, model_.y_desired);

  constrained_.assign(layout_.size(), false);
  const auto vmask = velocity_.dirichlet_mask();
  for (int i = 0; i < 2 * layout_.n2; ++i) {
    constrained_[layout_.u() + i] = vmask[i];
    constrained_[layout_.y() + i] = vmask[i];
  }
}

void FlowProblem::set_targets(const Vector& u_d, const Vector& y_d) {
  if (u_d.size() != u_target_.size() || y_d.size() != y_target_.size())
    throw InvalidInput("set_targets: target sizes do not match the P2 spaces");
  u_target_ = u_d;
  y_target_ = y_d;
}

Vector pack(const FlowProblem& problem, const StateFields& s) {
  const DofLayout& L = problem.layout();
  if (s.u.size() != 2 * L.n2 || s.p.size() != L.n1 || s.y.size() != 2 * L.n2)
    throw InvalidInput("pack: state fields do not match the problem");
  Vector x(L.size());
  x.segment(L.u(), 2 * L.n2) = s.u;
  x.segment(L.p(), L.n1) = s.p;
  x[L.multiplier()] = s.multiplier;
  x.segment(L.y(), 2 * L.n2) = s.y;
  return x;
}

StateFields unpack(const FlowProblem& problem, const Vector& x) {
  const DofLayout& L = problem.layout();
  if (x.size() != L.size()) throw InvalidInput("unpack: vector size does not match the problem");
  StateFields s;
  s.u = x.segment(L.u(), 2 * L.n2);
  s.p = x.segment(L.p(), L.n1);
  s.multiplier = x[L.multiplier()];
  s.y = x.segment(L.y(), 2 * L.n2);
  return s;
}

Vector initial_guess(const FlowProblem& problem) {
  return enforce_boundary(problem, Vector::Zero(problem.layout().size()));
}

Vector state_residual(const FlowProblem& problem, const Vector& x, const Vector& control, double load_scale,
                      bool constrained) {
  const DofLayout& L = problem.layout();
  if (control.size() != problem.num_controls()) throw InvalidInput("state_residual: control size mismatch");
  const StateFields s = unpack(problem, x);
  const Vector T = s.T();
  const PhysicalModel& m = problem.model();

  Vector r(L.size());
  Vector ru = assemble_a(problem.velocity(), T, m) * s.u + assemble_c_skew(problem.velocity(), s.u) * s.u +
              problem.divergence().transpose() * s.p;
  ru -= load_scale * (assemble_buoyancy(problem.velocity(), s.y, m) + problem.control_coupling() * control +
                      problem.source_u());
  r.segment(L.u(), 2 * L.n2) = ru;
  r.segment(L.p(), L.n1) = problem.divergence() * s.u + problem.pressure_mean() * s.multiplier;
  r[L.multiplier()] = problem.pressure_mean().dot(s.p);
  r.segment(L.y(), 2 * L.n2) = problem.scalar_diffusion() * s.y + assemble_cy_skew(problem.pair(), s.u) * s.y -
                               load_scale * problem.source_y();
  if (constrained) zero_constrained(problem, r);
  return r;
}

namespace {

// Blocks shared by the Newton and Picard operators.
void add_common_blocks(const FlowProblem& problem, const StateFields& s, TripletList& t) {
  const DofLayout& L = problem.layout();
  const SparseMatrix& B = problem.divergence();
  add_block(t, assemble_a(problem.velocity(), s.T(), problem.model()), L.u(), L.u());
  add_block(t, assemble_c_skew(problem.velocity(), s.u), L.u(), L.u());
  add_block(t, SparseMatrix(B.transpose()), L.u(), L.p());
  add_block(t, B, L.p(), L.u());
  const Vector& m = problem.pressure_mean();
  for (int i = 0; i < L.n1; ++i) {
    t.emplace_back(L.p() + i, L.multiplier(), m[i]);
    t.emplace_back(L.multiplier(), L.p() + i, m[i]);
  }
  add_block(t, problem.scalar_diffusion(), L.y(), L.y());
  add_block(t, assemble_cy_skew(problem.pair(), s.u), L.y(), L.y());
}

}  // namespace

SparseMatrix newton_jacobian(const FlowProblem& problem, const Vector& x, double load_scale, bool constrained) {
  const DofLayout& L = problem.layout();
  const StateFields s = unpack(problem, x);
  const PhysicalModel& m = problem.model();
  TripletList t;
  add_common_blocks(problem, s, t);
  add_block(t, assemble_c_skew_transport(problem.velocity(), s.u), L.u(), L.u());
  add_block(t, assemble_viscosity_sensitivity(problem.velocity(), s.u, s.T(), m), L.u(), L.y());
  add_block(t, assemble_buoyancy_jacobian(problem.velocity(), s.y, m), L.u(), L.y(), -load_scale);
  add_block(t, assemble_cy_skew_transport(problem.pair(), problem.velocity(), s.y), L.y(), L.u());
  SparseMatrix J = from_triplets(L.size(), L.size(), t);
  return constrained ? constrain_homogeneous(J, problem.constrained()) : J;
}

SparseMatrix picard_operator(const FlowProblem& problem, const Vector& x) {
  const DofLayout& L = problem.layout();
  TripletList t;
  add_common_blocks(problem, unpack(problem, x), t);
  return constrain_homogeneous(from_triplets(L.size(), L.size(), t), problem.constrained());
}

StateSolution solve_state(const FlowProblem& problem, const Vector& control, const NewtonOptions& opts,
                          const Vector& guess) {
  if (!(opts.tol > 0.0) || opts.max_iterations < 1 || opts.max_halvings < 0)
    throw InvalidInput("solve_state: invalid Newton options");
  Vector x = guess.size() == 0 ? initial_guess(problem) : enforce_boundary(problem, guess);
  if (x.size() != problem.layout().size()) throw InvalidInput("solve_state: initial guess has the wrong size");

  NewtonReport report;
  auto eval = [&](const Vector& z) { return state_residual(problem, z, control, opts.load_scale); };
  Vector r = eval(x);
  double norm = r.norm();
  report.residual_history.push_back(norm);
  report.equation_history.push_back(equation_norms(problem, r));
  bool picard_done = false;

  for (int it = 0; it < opts.max_iterations && (it < opts.min_iterations || !(norm <= opts.tol)); ++it) {
    if (norm == 0.0) break;
    SparseDirectSolver solver(newton_jacobian(problem, x, opts.load_scale));
    const Vector dx = solver.solve(-r);
    double alpha = 1.0;
    bool accepted = false;
    Vector xt, rt;
    for (int k = 0; k <= opts.max_halvings; ++k, alpha *= 0.5) {
      xt = x + alpha * dx;
      rt = eval(xt);
      if (rt.norm() < norm) {
        accepted = true;
        break;
      }
      // undamped step failed early on: switch to the fixed point iteration
      if (k == 0 && it < 2 && !picard_done && opts.picard_iterations > 0) break;
    }
    if (!accepted && it < 2 && !picard_done && opts.picard_iterations > 0) {
      picard_done = true;
      for (int k = 0; k < opts.picard_iterations; ++k) {
        SparseDirectSolver picard(picard_operator(problem, x));
        x -= picard.solve(r);
        r = eval(x);
        norm = r.norm();
        ++report.picard_steps;
        report.residual_history.push_back(norm);
        report.equation_history.push_back(equation_norms(problem, r));
        if (!std::isfinite(norm)) break;
      }
      ++report.iterations;
      continue;
    }
    if (!accepted) {
      if (norm <= opts.tol) break;  // forced step at round-off level
      std::ostringstream msg;
      msg << "Newton line search failed at iteration " << it << " with residual " << norm;
      throw StateNonconvergence(msg.str(), report);
    }
    x = xt;
    r = rt;
    norm = r.norm();
    ++report.iterations;
    report.damping.push_back(alpha);
    report.residual_history.push_back(norm);
    report.equation_history.push_back(equation_norms(problem, r));
  }
  report.converged = norm <= opts.tol;
  if (!report.converged) {
    std::ostringstream msg;
    msg << "Newton did not converge in " << opts.max_iterations << " iterations (residual " << norm << ")";
    throw StateNonconvergence(msg.str(), report);
  }
  return {unpack(problem, x), report};
}

StateSolution continuation_solve(const FlowProblem& problem, const Vector& control, const std::vector<double>& ramp,
                                 const NewtonOptions& opts) {
  if (ramp.empty() || ramp.back() != 1.0) throw InvalidInput("continuation_solve: ramp must end at 1");
  for (std::size_t i = 0; i < ramp.size(); ++i)
    if (ramp[i] < 0.0 || ramp[i] > 1.0 || (i > 0 && ramp[i] <= ramp[i - 1]))
      throw InvalidInput("continuation_solve: ramp must increase within [0, 1]");
  Vector x;
  StateSolution sol;
  double last_good = 0.0;
  for (double stage : ramp) {
    NewtonOptions o = opts;
    o.load_scale = stage;
    try {
      sol = solve_state(problem, control, o, x);
    } catch (const SolverFailure& e) {
      StateFields good = x.size() ? unpack(problem, x) : unpack(problem, initial_guess(problem));
      std::ostringstream msg;
      msg << "continuation failed at stage " << stage << ": " << e.what();
      throw ContinuationFailure(msg.str(), e.achieved_residual(), last_good, good);
    }
    x = pack(problem, sol.state);
    last_good = stage;
  }
  return sol;
}

double l2_norm(const FlowProblem& problem, const Vector& field) {
  return std::sqrt(std::max(0.0, field.dot(problem.velocity_mass() * field)));
}

double h1_norm(const FlowProblem& problem, const Vector& field) {
  return std::sqrt(std::max(0.0, field.dot(problem.velocity_mass() * field) +
                                     field.dot(problem.vector_stiffness() * field)));
}

StateNorms state_norms(const FlowProblem& problem, const StateFields& state) {
  StateNorms out;
  out.Mu = h1_norm(problem, state.u);
  out.My = h1_norm(problem, state.y);
  const TriMesh& mesh = problem.mesh();
  const int n2 = problem.layout().n2;
  CellValues cv(mesh, triangle_rule(1));
  double h2 = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    cv.reinit(c);
    const auto& d = cv.p2_dofs();
    for (const Vector* f : {&state.u, &state.y})
      for (int k = 0; k < 2; ++k) {
        Mat2 H = Mat2::Zero();
        for (int i = 0; i < 6; ++i) H += (*f)[k * n2 + d[i]] * cv.p2_hessian(i);
        h2 += mesh.signed_area(c) * H.squaredNorm();
      }
  }
  out.M = out.Mu + out.My + std::sqrt(h2);
  return out;
}

namespace {

double f0(double t) { return t * t * (1 - t) * (1 - t); }
double f1(double t) { return 2 * t * (1 - t) * (1 - 2 * t); }
double f2(double t) { return 2 * (1 - 6 * t + 6 * t * t); }
double f3(double t) { return 12 * (2 * t - 1); }

double bump(const Vec2& x) { return std::sin(kPi * x.x()) * std::sin(kPi * x.y()); }
Vec2 grad_bump(const Vec2& x) {
  return kPi * Vec2(std::cos(kPi * x.x()) * std::sin(kPi * x.y()), std::sin(kPi * x.x()) * std::cos(kPi * x.y()));
}

}  // namespace

Vec2 ManufacturedSolution::u(const Vec2& x) const {
  return amplitude * Vec2(f0(x.x()) * f1(x.y()), -f1(x.x()) * f0(x.y()));
}

Mat2 ManufacturedSolution::grad_u(const Vec2& x) const {
  Mat2 g;
  g << f1(x.x()) * f1(x.y()), f0(x.x()) * f2(x.y()), -f2(x.x()) * f0(x.y()), -f1(x.x()) * f1(x.y());
  return amplitude * g;
}

Vec2 ManufacturedSolution::laplace_u(const Vec2& x) const {
  return amplitude * Vec2(f2(x.x()) * f1(x.y()) + f0(x.x()) * f3(x.y()),
                          -(f3(x.x()) * f0(x.y()) + f1(x.x()) * f2(x.y())));
}

double ManufacturedSolution::p(const Vec2& x) const {
  return pressure * std::cos(kPi * x.x()) * std::cos(kPi * x.y());
}

Vec2 ManufacturedSolution::grad_p(const Vec2& x) const {
  return -pressure * kPi *
         Vec2(std::sin(kPi * x.x()) * std::cos(kPi * x.y()), std::cos(kPi * x.x()) * std::sin(kPi * x.y()));
}

Vec2 ManufacturedSolution::y(const Vec2& x) const {
  const double g = bump(x);
  return Vec2(x.x() + bump_T * g, slope_S * x.y() + bump_S * g);
}

Mat2 ManufacturedSolution::grad_y(const Vec2& x) const {
  const Vec2 g = grad_bump(x);
  Mat2 out;
  out.row(0) = Vec2(1.0, 0.0) + bump_T * g;
  out.row(1) = Vec2(0.0, slope_S) + bump_S * g;
  return out;
}

Vec2 ManufacturedSolution::laplace_y(const Vec2& x) const {
  return -2.0 * kPi * kPi * bump(x) * Vec2(bump_T, bump_S);
}

Vec2 ManufacturedSolution::f_u(const PhysicalModel& model, const Vec2& x) const {
  const Vec2 vel = u(x);
  const Mat2 gu = grad_u(x);
  const Vec2 yy = y(x);
  const Vec2 gradT = grad_y(x).row(0).transpose();
  const double T = yy.x();
  return model.kinv * vel + gu * vel - model.viscosity.value(T) * laplace_u(x) -
         model.viscosity.d1(T) * (gu * gradT) + grad_p(x) - model.buoyancy.value(yy);
}

Vec2 ManufacturedSolution::f_y(const PhysicalModel& model, const Vec2& x) const {
  return -model.diffusion * laplace_y(x) + grad_y(x) * u(x);
}

PhysicalModel ManufacturedSolution::apply(PhysicalModel model) const {
  const ManufacturedSolution self = *this;
  const PhysicalModel coefficients = model;
  model.y_boundary = [self](const Vec2& x) { return self.y(x); };
  model.f_u = [self, coefficients](const Vec2& x) { return self.f_u(coefficients, x); };
  model.f_y = [self, coefficients](const Vec2& x) { return self.f_y(coefficients, x); };
  return model;
}

DiscretizationErrors compute_errors(const FlowProblem& problem, const StateFields& state,
                                    const ManufacturedSolution& exact) {
  const TriMesh& mesh = problem.mesh();
  const int n2 = problem.layout().n2;
  CellValues cv(mesh, triangle_rule(6));
  double eu0 = 0, eu1 = 0, ep = 0, ey0 = 0, ey1 = 0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    cv.reinit(c);
    for (int q = 0; q < cv.num_points(); ++q) {
      const Vec2& x = cv.point(q);
      const double w = cv.jxw(q);
      const Vec2 ue = exact.u(x), ye = exact.y(x);
      const Mat2 gue = exact.grad_u(x), gye = exact.grad_y(x);
      for (int k = 0; k < 2; ++k) {
        eu0 += w * std::pow(cv.p2_value(state.u, k * n2, q) - ue[k], 2);
        eu1 += w * (cv.p2_gradient(state.u, k * n2, q) - gue.row(k).transpose()).squaredNorm();
        ey0 += w * std::pow(cv.p2_value(state.y, k * n2, q) - ye[k], 2);
        ey1 += w * (cv.p2_gradient(state.y, k * n2, q) - gye.row(k).transpose()).squaredNorm();
      }
      ep += w * std::pow(cv.p1_value(state.p, q) - exact.p(x), 2);
    }
  }
  return {std::sqrt(eu0), std::sqrt(eu0 + eu1), std::sqrt(ep), std::sqrt(ey0 + ey1)};
}

}  // namespace ddflow
