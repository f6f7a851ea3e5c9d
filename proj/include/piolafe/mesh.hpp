#pragma once

#include "piolafe/geometry.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace piolafe
{

/// Boundary tags used by the structured generator.
enum BoundaryTag : int
{
  interior = 0,
  left = 1,
  right = 2,
  bottom = 3,
  top = 4
};

enum class Pattern
{
  right,
  crossed
};

Pattern pattern_from_name(const std::string& name);

class Mesh
{
public:
  using Edge = std::array<int, 2>;

  /// Cells are sorted internally. Boundary edges without an entry in
  /// `tags` raise InconsistentBoundaryTags.
  Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> cells,
       const std::map<Edge, int>& tags);

  /// Tag boundary edges with a function of the edge midpoint.
  Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> cells,
       const std::function<int(const Point&)>& tagger);

  int num_vertices() const { return static_cast<int>(_vertices.size()); }
  int num_cells() const { return static_cast<int>(_cells.size()); }
  int num_edges() const { return static_cast<int>(_edges.size()); }

  const std::vector<Point>& vertices() const { return _vertices; }
  const std::vector<std::array<int, 3>>& cells() const { return _cells; }
  const std::vector<Edge>& edges() const { return _edges; }

  /// Global edge of local edge k (which excludes local vertex k).
  int cell_edge(int c, int k) const { return _cell_edges[c][k]; }
  /// Incident cells; second is -1 on the boundary.
  const std::array<int, 2>& edge_cells(int e) const { return _edge_cells[e]; }
  int edge_tag(int e) const { return _edge_tags[e]; }
  bool is_boundary_edge(int e) const { return _edge_cells[e][1] < 0; }
  /// -1 if no such edge.
  int find_edge(int a, int b) const;

  Triangle cell_triangle(int c) const;
  double edge_length(int e) const;
  Point edge_midpoint(int e) const;
  /// Longest edge over all cells.
  double max_edge_length() const;
  std::vector<char> boundary_vertices() const;
  /// Cells containing each vertex.
  std::vector<std::vector<int>> vertex_cells() const;
  std::map<Edge, int> boundary_tags() const;

private:
  void build(const std::map<Edge, int>* tags,
             const std::function<int(const Point&)>* tagger);

  std::vector<Point> _vertices;
  std::vector<std::array<int, 3>> _cells;
  std::vector<Edge> _edges;
  std::map<Edge, int> _edge_index;
  std::vector<std::array<int, 3>> _cell_edges;
  std::vector<std::array<int, 2>> _edge_cells;
  std::vector<int> _edge_tags;
};

/// Tag by side of the rectangle [x0,x1] x [y0,y1].
std::function<int(const Point&)> rectangle_tagger(double x0, double x1,
                                                  double y0, double y1);

/// Triangulation of [0,lx] x [0,ly] with nx x ny squares.
Mesh structured_rectangle(int nx, int ny, Pattern pattern, double lx = 1.0,
                          double ly = 1.0);

/// Deterministic random displacement of interior vertices.
Mesh perturb_interior(const Mesh& mesh, double amplitude, std::uint64_t seed);

/// Split every triangle into four through the edge midpoints.
Mesh refine_uniform(const Mesh& mesh);

void write_mesh(const Mesh& mesh, std::ostream& out);
Mesh read_mesh(std::istream& in);
void save_mesh(const Mesh& mesh, const std::string& path);
Mesh load_mesh(const std::string& path);

} // namespace piolafe
