#pragma once

#include "piolafe/geometry.hpp"

#include <vector>

namespace piolafe
{

enum class Domain
{
  interval,
  triangle
};

struct QuadratureRule
{
  Domain domain;
  /// Interval rules store s in x() and zero in y().
  std::vector<Point> points;
  std::vector<double> weights;
  int degree;
};

inline constexpr int max_quadrature_degree = 12;

/// Gauss-Legendre on [0,1] (interval) or collapsed Gauss-Legendre on the
/// reference triangle. Rules are built once and cached.
const QuadratureRule& quadrature(Domain domain, int degree);

/// Gauss-Legendre nodes and weights on [0,1] with m points.
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w);

} // namespace piolafe
