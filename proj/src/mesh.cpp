#include "piolafe/mesh.hpp"
#include "piolafe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace piolafe
{

//-----------------------------------------------------------------------------
Pattern pattern_from_name(const std::string& name)
{
  if (name == "right")
    return Pattern::right;
  if (name == "crossed")
    return Pattern::crossed;
  throw Error("unknown mesh pattern '" + name + "'");
}
//-----------------------------------------------------------------------------
Mesh::Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> cells,
           const std::map<Edge, int>& tags)
    : _vertices(std::move(vertices)), _cells(std::move(cells))
{
  build(&tags, nullptr);
}
//-----------------------------------------------------------------------------
Mesh::Mesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> cells,
           const std::function<int(const Point&)>& tagger)
    : _vertices(std::move(vertices)), _cells(std::move(cells))
{
  build(nullptr, &tagger);
}
//-----------------------------------------------------------------------------
void Mesh::build(const std::map<Edge, int>* tags,
                 const std::function<int(const Point&)>* tagger)
{
  const int nv = num_vertices();
  for (auto& c : _cells)
  {
    for (int v : c)
      if (v < 0 || v >= nv)
        throw Error("cell references a missing vertex");
    std::sort(c.begin(), c.end());
    if (c[0] == c[1] || c[1] == c[2])
      throw DegenerateTriangle("repeated vertex in cell");
  }
  _cell_edges.resize(_cells.size());
  for (std::size_t c = 0; c < _cells.size(); ++c)
  {
    cell_triangle(c).check();
    for (int k = 0; k < 3; ++k)
    {
      const Edge e = {_cells[c][edge_vertices[k][0]], _cells[c][edge_vertices[k][1]]};
      auto [it, inserted] = _edge_index.try_emplace(e, num_edges());
      if (inserted)
      {
        _edges.push_back(e);
        _edge_cells.push_back({static_cast<int>(c), -1});
      }
      else
      {
        auto& ec = _edge_cells[it->second];
        if (ec[1] >= 0)
          throw Error("non-conforming mesh: edge shared by more than two cells");
        ec[1] = static_cast<int>(c);
      }
      _cell_edges[c][k] = it->second;
    }
  }
  _edge_tags.assign(_edges.size(), BoundaryTag::interior);
  for (int e = 0; e < num_edges(); ++e)
  {
    if (!is_boundary_edge(e))
      continue;
    int tag = 0;
    if (tags)
    {
      auto it = tags->find(_edges[e]);
      if (it != tags->end())
        tag = it->second;
    }
    else
      tag = (*tagger)(edge_midpoint(e));
    if (tag <= 0)
      throw InconsistentBoundaryTags("boundary edge (" + std::to_string(_edges[e][0])
                                     + ", " + std::to_string(_edges[e][1])
                                     + ") has no tag");
    _edge_tags[e] = tag;
  }
  if (tags)
    for (const auto& [e, tag] : *tags)
    {
      const int id = find_edge(e[0], e[1]);
      if (id < 0 || !is_boundary_edge(id))
        throw InconsistentBoundaryTags("tag on an edge that is not a boundary edge");
    }
}
//-----------------------------------------------------------------------------
int Mesh::find_edge(int a, int b) const
{
  auto it = _edge_index.find({std::min(a, b), std::max(a, b)});
  return it == _edge_index.end() ? -1 : it->second;
}
//-----------------------------------------------------------------------------
Triangle Mesh::cell_triangle(int c) const
{
  const auto& v = _cells[c];
  return Triangle{{_vertices[v[0]], _vertices[v[1]], _vertices[v[2]]}};
}
//-----------------------------------------------------------------------------
double Mesh::edge_length(int e) const
{
  return (_vertices[_edges[e][1]] - _vertices[_edges[e][0]]).norm();
}
//-----------------------------------------------------------------------------
Point Mesh::edge_midpoint(int e) const
{
  return 0.5 * (_vertices[_edges[e][0]] + _vertices[_edges[e][1]]);
}
//-----------------------------------------------------------------------------
double Mesh::max_edge_length() const
{
  double h = 0.0;
  for (int e = 0; e < num_edges(); ++e)
    h = std::max(h, edge_length(e));
  return h;
}
//-----------------------------------------------------------------------------
std::vector<char> Mesh::boundary_vertices() const
{
  std::vector<char> b(_vertices.size(), 0);
  for (int e = 0; e < num_edges(); ++e)
    if (is_boundary_edge(e))
      b[_edges[e][0]] = b[_edges[e][1]] = 1;
  return b;
}
//-----------------------------------------------------------------------------
std::vector<std::vector<int>> Mesh::vertex_cells() const
{
  std::vector<std::vector<int>> vc(_vertices.size());
  for (int c = 0; c < num_cells(); ++c)
    for (int v : _cells[c])
      vc[v].push_back(c);
  return vc;
}
//-----------------------------------------------------------------------------
std::map<Mesh::Edge, int> Mesh::boundary_tags() const
{
  std::map<Edge, int> t;
  for (int e = 0; e < num_edges(); ++e)
    if (is_boundary_edge(e))
      t[_edges[e]] = _edge_tags[e];
  return t;
}
//-----------------------------------------------------------------------------
std::function<int(const Point&)> rectangle_tagger(double x0, double x1,
                                                  double y0, double y1)
{
  const double tol = 1e-10 * std::max(x1 - x0, y1 - y0);
  return [=](const Point& p)
  {
    if (std::abs(p.x() - x0) < tol)
      return int(BoundaryTag::left);
    if (std::abs(p.x() - x1) < tol)
      return int(BoundaryTag::right);
    if (std::abs(p.y() - y0) < tol)
      return int(BoundaryTag::bottom);
    if (std::abs(p.y() - y1) < tol)
      return int(BoundaryTag::top);
    return int(BoundaryTag::interior);
  };
}
//-----------------------------------------------------------------------------
Mesh structured_rectangle(int nx, int ny, Pattern pattern, double lx, double ly)
{
  if (nx < 1 || ny < 1)
    throw Error("structured_rectangle needs nx, ny >= 1");
  std::vector<Point> v;
  std::vector<std::array<int, 3>> cells;
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      v.emplace_back(lx * i / nx, ly * j / ny);

  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
    {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1),
                d = id(i, j + 1);
      if (pattern == Pattern::right)
      {
        cells.push_back({a, b, c});
        cells.push_back({a, c, d});
      }
      else
      {
        const int m = static_cast<int>(v.size());
        v.emplace_back(lx * (i + 0.5) / nx, ly * (j + 0.5) / ny);
        cells.push_back({a, b, m});
        cells.push_back({b, c, m});
        cells.push_back({c, d, m});
        cells.push_back({d, a, m});
      }
    }
  return Mesh(std::move(v), std::move(cells), rectangle_tagger(0, lx, 0, ly));
}
//-----------------------------------------------------------------------------
Mesh perturb_interior(const Mesh& mesh, double amplitude, std::uint64_t seed)
{
  if (amplitude < 0.0 || amplitude >= 0.4)
    throw Error("perturbation amplitude must lie in [0, 0.4)");
  std::vector<Point> v = mesh.vertices();
  const std::vector<char> bnd = mesh.boundary_vertices();
  std::vector<double> hmin(v.size(), std::numeric_limits<double>::max());
  for (int e = 0; e < mesh.num_edges(); ++e)
    for (int a : mesh.edges()[e])
      hmin[a] = std::min(hmin[a], mesh.edge_length(e));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    // draw for every vertex so the sequence does not depend on the boundary
    Point d(u(rng), u(rng));
    while (d.norm() > 1.0)
      d = Point(u(rng), u(rng));
    if (!bnd[i])
      v[i] += amplitude * hmin[i] * d;
  }

  for (int c = 0; c < mesh.num_cells(); ++c)
  {
    const auto& cv = mesh.cells()[c];
    const Triangle t{{v[cv[0]], v[cv[1]], v[cv[2]]}};
    const double d0 = mesh.cell_triangle(c).signed_double_area();
    const double d1 = t.signed_double_area();
    const double diam = t.diameter();
    if (d0 * d1 <= 0.0 || std::abs(d1) <= 1e-12 * diam * diam)
      throw DegenerateResult("perturbation inverts a cell");
  }
  return Mesh(std::move(v), mesh.cells(), mesh.boundary_tags());
}
//-----------------------------------------------------------------------------
Mesh refine_uniform(const Mesh& mesh)
{
  std::vector<Point> v = mesh.vertices();
  const int nv = mesh.num_vertices();
  for (int e = 0; e < mesh.num_edges(); ++e)
    v.push_back(mesh.edge_midpoint(e));
  std::vector<std::array<int, 3>> cells;
  for (int c = 0; c < mesh.num_cells(); ++c)
  {
    const auto& cv = mesh.cells()[c];
    // midpoint opposite local vertex k
    const int m0 = nv + mesh.cell_edge(c, 0);
    const int m1 = nv + mesh.cell_edge(c, 1);
    const int m2 = nv + mesh.cell_edge(c, 2);
    cells.push_back({cv[0], m2, m1});
    cells.push_back({cv[1], m0, m2});
    cells.push_back({cv[2], m1, m0});
    cells.push_back({m0, m1, m2});
  }
  std::map<Mesh::Edge, int> tags;
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (mesh.is_boundary_edge(e))
    {
      const auto& ev = mesh.edges()[e];
      const int m = nv + e;
      tags[{std::min(ev[0], m), std::max(ev[0], m)}] = mesh.edge_tag(e);
      tags[{std::min(ev[1], m), std::max(ev[1], m)}] = mesh.edge_tag(e);
    }
  return Mesh(std::move(v), std::move(cells), tags);
}
//-----------------------------------------------------------------------------
void write_mesh(const Mesh& mesh, std::ostream& out)
{
  out << "vertices " << mesh.num_vertices() << " cells " << mesh.num_cells()
      << "\n";
  out << std::setprecision(17);
  for (const Point& p : mesh.vertices())
    out << p.x() << " " << p.y() << "\n";
  for (const auto& c : mesh.cells())
    out << c[0] << " " << c[1] << " " << c[2] << "\n";
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (mesh.is_boundary_edge(e))
      out << "edge " << mesh.edges()[e][0] << " " << mesh.edges()[e][1] << " "
          << mesh.edge_tag(e) << "\n";
}
//-----------------------------------------------------------------------------
Mesh read_mesh(std::istream& in)
{
  std::string w1, w2;
  long nv = -1, nc = -1;
  if (!(in >> w1 >> nv >> w2 >> nc) || w1 != "vertices" || w2 != "cells"
      || nv < 0 || nc < 0)
    throw MeshFormatError("expected header 'vertices N cells M'");
  std::vector<Point> v(nv);
  for (auto& p : v)
    if (!(in >> p.x() >> p.y()))
      throw MeshFormatError("truncated vertex list");
  std::vector<std::array<int, 3>> cells(nc);
  for (auto& c : cells)
    if (!(in >> c[0] >> c[1] >> c[2]))
      throw MeshFormatError("truncated cell list");
  std::map<Mesh::Edge, int> tags;
  std::string word;
  while (in >> word)
  {
    int a, b, t;
    if (word != "edge" || !(in >> a >> b >> t))
      throw MeshFormatError("malformed boundary tag line");
    tags[{std::min(a, b), std::max(a, b)}] = t;
  }
  return Mesh(std::move(v), std::move(cells), tags);
}
//-----------------------------------------------------------------------------
void save_mesh(const Mesh& mesh, const std::string& path)
{
  std::ofstream f(path);
  if (!f)
    throw Error("cannot open " + path);
  write_mesh(mesh, f);
}
//-----------------------------------------------------------------------------
Mesh load_mesh(const std::string& path)
{
  std::ifstream f(path);
  if (!f)
    throw Error("cannot open " + path);
  return read_mesh(f);
}
//-----------------------------------------------------------------------------

} // namespace piolafe
