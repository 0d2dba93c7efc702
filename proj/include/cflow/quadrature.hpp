#pragma once

#include <array>
#include <vector>

namespace cflow {

/// Triangle rule in barycentric coordinates; weights sum to 1 (multiply by
/// the triangle area).
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Rule on [0,1]; weights sum to 1.
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;
};

/// 3-point rule, exact through degree 2 (P1 forms).
const TriangleRule& triangle_rule_degree2();
/// 6-point Dunavant rule, exact through degree 4 (P2 and Morley forms).
const TriangleRule& triangle_rule_degree4();
/// Collapsed Gauss product rule with n^2 points, exact through degree 2n-2.
TriangleRule conical_rule(int n);
/// n-point Gauss-Legendre rule on [0,1], exact through degree 2n-1.
LineRule gauss_legendre(int n);

}  // namespace cflow
