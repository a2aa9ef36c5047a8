#pragma once

#include <array>
#include <vector>

namespace ddflow {

/// Rule on the reference triangle {(0,0),(1,0),(0,1)}. Points are barycentric
/// (L0, L1, L2); weights sum to the reference area 1/2.
struct QuadratureRule {
  int degree = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(weights.size()); }
};

/// Symmetric Gauss rules exact up to the requested degree. Supported degrees
/// are 1, 2 and 6 (Dunavant); any other degree d <= 6 returns the
/// smallest supported rule with degree >= d.
const QuadratureRule& triangle_rule(int degree);

}  // namespace ddflow
