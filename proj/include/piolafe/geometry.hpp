#pragma once

#include <Eigen/Dense>
#include <array>

namespace piolafe
{

using Point = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Local vertices of edge k (0-based). Edge k excludes vertex k and
/// runs from the lower to the higher numbered vertex.
inline constexpr std::array<std::array<int, 2>, 3> edge_vertices
    = {{{1, 2}, {0, 2}, {0, 1}}};

struct Triangle
{
  std::array<Point, 3> vertices;

  /// det[x1 - x0 | x2 - x0]
  double signed_double_area() const;
  double area() const { return 0.5 * std::abs(signed_double_area()); }
  double diameter() const;
  Point centroid() const;
  /// Throws DegenerateTriangle when |det| <= 1e-12 * diam^2
  void check() const;
};

Triangle reference_triangle();

/// Rotation taking a tangent to its normal, n = R t.
Point rotate(const Point& t);

struct AffineCellMap
{
  Mat2 J;
  Mat2 Jinv;
  double detJ;
  Point translation;
  Triangle source;
  Triangle target;

  Point operator()(const Point& xhat) const { return J * xhat + translation; }
  Point pullback_point(const Point& x) const
  {
    return Jinv * (x - translation);
  }
};

AffineCellMap affine_map(const Triangle& ref, const Triangle& phys);

/// Map from the reference triangle.
inline AffineCellMap affine_map(const Triangle& phys)
{
  return affine_map(reference_triangle(), phys);
}

struct EdgeFrame
{
  int index;
  Point vector;
  double length;
  Point tangent;
  Point normal;
  // only meaningful for a mapped cell
  double alpha = 0.0;
  double beta = 1.0;
  double length_ratio = 1.0;
};

/// Frames of a bare triangle (alpha = 0, beta = 1, ratio 1).
std::array<EdgeFrame, 3> edge_frames(const Triangle& tri);

/// Frames of the target triangle including the mapped factors.
std::array<EdgeFrame, 3> edge_frames(const AffineCellMap& map);

} // namespace piolafe
