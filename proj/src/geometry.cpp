#include "piolafe/geometry.hpp"
#include "piolafe/errors.hpp"

#include <algorithm>
#include <cmath>

namespace piolafe
{

//-----------------------------------------------------------------------------
double Triangle::signed_double_area() const
{
  const Point a = vertices[1] - vertices[0];
  const Point b = vertices[2] - vertices[0];
  return a.x() * b.y() - a.y() * b.x();
}
//-----------------------------------------------------------------------------
double Triangle::diameter() const
{
  return std::max({(vertices[1] - vertices[0]).norm(),
                   (vertices[2] - vertices[0]).norm(),
                   (vertices[2] - vertices[1]).norm()});
}
//-----------------------------------------------------------------------------
Point Triangle::centroid() const
{
  return (vertices[0] + vertices[1] + vertices[2]) / 3.0;
}
//-----------------------------------------------------------------------------
void Triangle::check() const
{
  const double d = diameter();
  if (!(std::abs(signed_double_area()) > 1e-12 * d * d))
    throw DegenerateTriangle("degenerate triangle");
}
//-----------------------------------------------------------------------------
Triangle reference_triangle()
{
  return Triangle{{Point(0, 0), Point(1, 0), Point(0, 1)}};
}
//-----------------------------------------------------------------------------
Point rotate(const Point& t) { return Point(t.y(), -t.x()); }
//-----------------------------------------------------------------------------
AffineCellMap affine_map(const Triangle& ref, const Triangle& phys)
{
  ref.check();
  phys.check();
  Mat2 A, B;
  A.col(0) = phys.vertices[1] - phys.vertices[0];
  A.col(1) = phys.vertices[2] - phys.vertices[0];
  B.col(0) = ref.vertices[1] - ref.vertices[0];
  B.col(1) = ref.vertices[2] - ref.vertices[0];

  AffineCellMap m;
  m.J = A * B.inverse();
  m.detJ = m.J.determinant();
  m.Jinv = m.J.inverse();
  m.translation = phys.vertices[0] - m.J * ref.vertices[0];
  m.source = ref;
  m.target = phys;
  return m;
}
//-----------------------------------------------------------------------------
std::array<EdgeFrame, 3> edge_frames(const Triangle& tri)
{
  std::array<EdgeFrame, 3> frames;
  for (int k = 0; k < 3; ++k)
  {
    EdgeFrame& f = frames[k];
    f.index = k;
    f.vector = tri.vertices[edge_vertices[k][1]]
               - tri.vertices[edge_vertices[k][0]];
    f.length = f.vector.norm();
    f.tangent = f.vector / f.length;
    f.normal = rotate(f.tangent);
  }
  return frames;
}
//-----------------------------------------------------------------------------
std::array<EdgeFrame, 3> edge_frames(const AffineCellMap& map)
{
  std::array<EdgeFrame, 3> ref = edge_frames(map.source);
  std::array<EdgeFrame, 3> frames = edge_frames(map.target);
  const Mat2 JtJ = map.J.transpose() * map.J;
  for (int k = 0; k < 3; ++k)
  {
    const Point w = JtJ * ref[k].tangent;
    frames[k].alpha = ref[k].normal.dot(w) / map.detJ;
    frames[k].beta = ref[k].tangent.dot(w) / map.detJ;
    frames[k].length_ratio = ref[k].length / frames[k].length;
  }
  return frames;
}
//-----------------------------------------------------------------------------

} // namespace piolafe
