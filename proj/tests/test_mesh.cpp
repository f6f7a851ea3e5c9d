#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "piolafe/errors.hpp"
#include "piolafe/mesh.hpp"
#include "piolafe/space.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <sstream>

using namespace piolafe;
using doctest::Approx;

namespace
{
std::shared_ptr<const Mesh> share(Mesh m) { return std::make_shared<const Mesh>(std::move(m)); }

void check_conforming(const Mesh& m)
{
  std::map<Mesh::Edge, int> count;
  for (const auto& c : m.cells())
  {
    CHECK(std::is_sorted(c.begin(), c.end()));
    for (int k = 0; k < 3; ++k)
      ++count[{c[edge_vertices[k][0]], c[edge_vertices[k][1]]}];
  }
  CHECK(static_cast<int>(count.size()) == m.num_edges());
  for (int e = 0; e < m.num_edges(); ++e)
  {
    const int n = count.at(m.edges()[e]);
    CHECK(n == (m.is_boundary_edge(e) ? 1 : 2));
    if (m.is_boundary_edge(e))
      CHECK(m.edge_tag(e) != interior);
  }
  // Euler characteristic of a disc
  CHECK(m.num_vertices() - m.num_edges() + m.num_cells() == 1);
}

double min_abs_det(const Mesh& m)
{
  double d = 1e300;
  for (int c = 0; c < m.num_cells(); ++c)
    d = std::min(d, std::abs(m.cell_triangle(c).signed_double_area()));
  return d;
}
} // namespace

TEST_CASE("structured meshes")
{
  const Mesh a = structured_rectangle(1, 1, Pattern::right);
  CHECK(a.num_cells() == 2);
  CHECK(a.num_vertices() == 4);
  CHECK(a.num_edges() == 5);
  CHECK(structured_rectangle(2, 2, Pattern::right).num_cells() == 8);
  const Mesh b = structured_rectangle(1, 1, Pattern::crossed);
  CHECK(b.num_cells() == 4);
  CHECK(b.num_vertices() == 5);
  CHECK(b.num_edges() == 8);
  for (const Mesh& m : {a, b, structured_rectangle(3, 2, Pattern::crossed, 2.0, 0.5),
                        structured_rectangle(5, 4, Pattern::right)})
    check_conforming(m);
}

TEST_CASE("boundary tags follow the sides")
{
  const Mesh m = structured_rectangle(3, 2, Pattern::right, 3.0, 2.0);
  for (int e = 0; e < m.num_edges(); ++e)
  {
    const Point p = m.edge_midpoint(e);
    if (!m.is_boundary_edge(e))
      continue;
    switch (m.edge_tag(e))
    {
    case left: CHECK(std::abs(p.x()) < 1e-14); break;
    case right: CHECK(std::abs(p.x() - 3) < 1e-14); break;
    case bottom: CHECK(std::abs(p.y()) < 1e-14); break;
    case top: CHECK(std::abs(p.y() - 2) < 1e-14); break;
    default: FAIL("untagged boundary edge");
    }
  }
}

TEST_CASE("uniform refinement")
{
  const Mesh m = structured_rectangle(1, 1, Pattern::right);
  const Mesh r = refine_uniform(m);
  CHECK(r.num_cells() == 8);
  check_conforming(r);
  double area = 0;
  for (int c = 0; c < r.num_cells(); ++c)
    area += r.cell_triangle(c).area();
  CHECK(area == Approx(1.0));
  // child boundary edges inherit the parent tag
  for (int e = 0; e < r.num_edges(); ++e)
    if (r.is_boundary_edge(e))
    {
      const Point p = r.edge_midpoint(e);
      const int expect = p.x() < 1e-14 ? left : p.x() > 1 - 1e-14 ? right
                         : p.y() < 1e-14 ? bottom : top;
      CHECK(r.edge_tag(e) == expect);
    }
  // warped geometry: new vertices are edge midpoints
  const Mesh w = perturb_interior(structured_rectangle(3, 3, Pattern::right), 0.2, 4);
  const Mesh wr = refine_uniform(w);
  for (const auto& e : w.edges())
  {
    const Point mid = 0.5 * (w.vertices()[e[0]] + w.vertices()[e[1]]);
    const bool found = std::any_of(wr.vertices().begin(), wr.vertices().end(),
                                   [&](const Point& p) { return (p - mid).norm() < 1e-14; });
    CHECK(found);
  }
}

TEST_CASE("interior perturbation")
{
  const Mesh m = structured_rectangle(4, 4, Pattern::right);
  const Mesh zero = perturb_interior(m, 0.0, 7);
  for (int v = 0; v < m.num_vertices(); ++v)
    CHECK((zero.vertices()[v] - m.vertices()[v]).norm() == 0.0);
  const Mesh a = perturb_interior(m, 0.2, 7), b = perturb_interior(m, 0.2, 7);
  const Mesh c = perturb_interior(m, 0.2, 8);
  bool moved = false, differs = false;
  const auto bnd = m.boundary_vertices();
  for (int v = 0; v < m.num_vertices(); ++v)
  {
    CHECK(a.vertices()[v] == b.vertices()[v]);
    if (bnd[v])
      CHECK(a.vertices()[v] == m.vertices()[v]);
    moved = moved || (a.vertices()[v] - m.vertices()[v]).norm() > 1e-3;
    differs = differs || (a.vertices()[v] - c.vertices()[v]).norm() > 1e-3;
  }
  CHECK(moved);
  CHECK(differs);
  for (std::uint64_t seed = 0; seed < 20; ++seed)
  {
    const Mesh p = perturb_interior(structured_rectangle(6, 6, Pattern::crossed), 0.2, seed);
    CHECK(min_abs_det(p) > 0.0);
    check_conforming(p);
  }
}

TEST_CASE("text format round-trip")
{
  const Mesh m = perturb_interior(structured_rectangle(3, 2, Pattern::crossed), 0.15, 3);
  std::stringstream s;
  write_mesh(m, s);
  const Mesh r = read_mesh(s);
  REQUIRE(r.num_vertices() == m.num_vertices());
  REQUIRE(r.num_cells() == m.num_cells());
  for (int v = 0; v < m.num_vertices(); ++v)
    CHECK(r.vertices()[v] == m.vertices()[v]);
  CHECK(r.cells() == m.cells());
  CHECK(r.boundary_tags() == m.boundary_tags());
}

TEST_CASE("malformed mesh files are rejected")
{
  std::stringstream empty("");
  CHECK_THROWS_AS(read_mesh(empty), MeshFormatError);
  std::stringstream bad("this is not a mesh\n");
  CHECK_THROWS_AS(read_mesh(bad), MeshFormatError);
}

TEST_CASE("cells are stored sorted")
{
  const std::vector<Point> v{Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)};
  const Mesh m(v, {{2, 1, 0}, {3, 0, 2}}, rectangle_tagger(0, 1, 0, 1));
  for (const auto& c : m.cells())
    CHECK(std::is_sorted(c.begin(), c.end()));
  CHECK(m.num_edges() == 5);
}

TEST_CASE("DOF counts")
{
  auto m1 = share(structured_rectangle(1, 1, Pattern::right));
  CHECK(build_global_space(m1, Family::MTW)->num_dofs() == 15);
  CHECK(build_global_space(m1, Family::AWc)->num_dofs() == 38);
  CHECK(build_global_space(share(structured_rectangle(1, 1, Pattern::crossed)), Family::DG0)
            ->num_dofs()
        == 4);
  auto m = share(perturb_interior(structured_rectangle(4, 3, Pattern::crossed), 0.2, 2));
  const int V = m->num_vertices(), E = m->num_edges(), C = m->num_cells();
  CHECK(build_global_space(m, Family::MTW)->num_dofs() == 3 * E);
  CHECK(build_global_space(m, Family::BDM1)->num_dofs() == 2 * E);
  CHECK(build_global_space(m, Family::AWnc)->num_dofs() == 4 * E + 3 * C);
  CHECK(build_global_space(m, Family::AWc)->num_dofs() == 3 * V + 4 * E + 3 * C);
  CHECK(build_global_space(m, Family::DG0)->num_dofs() == C);
  CHECK(build_global_space(m, Family::DG1)->num_dofs() == 6 * C);
}

TEST_CASE("shared DOFs and their scaling")
{
  auto m = share(perturb_interior(structured_rectangle(3, 3, Pattern::right), 0.2, 5));
  for (Family f : {Family::MTW, Family::AWc, Family::AWnc})
  {
    const auto S = build_global_space(m, f);
    std::vector<int> seen(S->num_dofs(), 0);
    for (int c = 0; c < m->num_cells(); ++c)
    {
      const auto dofs = S->cell_dofs(c);
      CHECK(std::set<int>(dofs.begin(), dofs.end()).size() == dofs.size());
      for (int d : dofs)
        ++seen[d];
    }
    for (int i = 0; i < S->num_dofs(); ++i)
    {
      CHECK(seen[i] > 0);
      const EntityRef& e = S->dof_entity(i);
      if (e.dim == 1)
      {
        CHECK(seen[i] == (m->is_boundary_edge(e.index) ? 1 : 2));
        CHECK(S->dof_scaling(i) == Approx(m->edge_length(e.index)));
      }
      else if (e.dim == 2)
        CHECK(S->dof_scaling(i) == Approx(m->cell_triangle(e.index).area()));
      else
        CHECK(S->dof_scaling(i) == 1.0);
    }
    const auto U = build_global_space(m, f, false);
    for (int i = 0; i < U->num_dofs(); ++i)
      CHECK(U->dof_scaling(i) == 1.0);
  }
}

TEST_CASE("boundary DOF selection")
{
  auto m = share(structured_rectangle(2, 2, Pattern::right));
  const auto S = build_global_space(m, Family::MTW);
  const int tags[] = {left};
  const auto b = S->boundary_dofs(tags);
  // two left edges with three DOFs each
  CHECK(b.size() == 6);
  for (int d : b)
  {
    CHECK(S->dof_on_boundary(d));
    CHECK(m->edge_tag(S->dof_entity(d).index) == left);
  }
}
