#include "ddflow/quadrature.hpp"

#include "ddflow/errors.hpp"

namespace ddflow {
namespace {

void add_orbit3(QuadratureRule& rule, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  rule.points.push_back({b, a, a});
  rule.points.push_back({a, b, a});
  rule.points.push_back({a, a, b});
  for (int k = 0; k < 3; ++k) rule.weights.push_back(0.5 * w);
}

void add_orbit6(QuadratureRule& rule, double a, double b, double w) {
  const double c = 1.0 - a - b;
  const std::array<std::array<double, 3>, 6> perms = {{{a, b, c}, {a, c, b}, {b, a, c},
                                                      {b, c, a}, {c, a, b}, {c, b, a}}};
  for (const auto& p : perms) {
    rule.points.push_back(p);
    rule.weights.push_back(0.5 * w);
  }
}

QuadratureRule make_centroid() {
  QuadratureRule r;
  r.degree = 1;
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(0.5);
  return r;
}

QuadratureRule make_degree2() {
  QuadratureRule r;
  r.degree = 2;
  add_orbit3(r, 1.0 / 6.0, 1.0 / 3.0);
  return r;
}

// Dunavant, degree 6, 12 points.
QuadratureRule make_degree6() {
  QuadratureRule r;
  r.degree = 6;
  add_orbit3(r, 0.249286745170910, 0.116786275726379);
  add_orbit3(r, 0.063089014491502, 0.050844906370207);
  add_orbit6(r, 0.053145049844817, 0.310352451033784, 0.082851075618374);
  return r;
}

}  // namespace

const QuadratureRule& triangle_rule(int degree) {
  static const QuadratureRule centroid = make_centroid();
  static const QuadratureRule deg2 = make_degree2();
  static const QuadratureRule deg6 = make_degree6();
  if (degree <= 1) return centroid;
  if (degree == 2) return deg2;
  if (degree <= 6) return deg6;
  throw InvalidInput("triangle_rule: degree above 6 is not available");
}

}  // namespace ddflow
