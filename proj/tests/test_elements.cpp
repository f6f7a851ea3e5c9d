#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.hpp"
#include "piolafe/elements.hpp"
#include "piolafe/transforms.hpp"

#include <cmath>
#include <random>

using namespace piolafe;
using doctest::Approx;

namespace
{
// Mean-free polynomials of degree <= 2 that are L2(K) orthogonal to P_r,
// as coefficients on (1, x, y, x^2, xy, y^2) in centred coordinates.
struct TestPolys
{
  Point c;
  double h;
  Eigen::MatrixXd coef; // rows: polynomials
  double value(int k, const Point& p) const
  {
    const double x = (p.x() - c.x()) / h, y = (p.y() - c.y()) / h;
    const double m[6] = {1, x, y, x * x, x * y, y * y};
    double s = 0;
    for (int i = 0; i < 6; ++i)
      s += coef(k, i) * m[i];
    return s;
  }
  Point gradient(int k, const Point& p) const
  {
    const double x = (p.x() - c.x()) / h, y = (p.y() - c.y()) / h;
    const Eigen::Matrix<double, 6, 2> d
        = (Eigen::Matrix<double, 6, 2>() << 0, 0, 1, 0, 0, 1, 2 * x, 0, y, x, 0, 2 * y)
              .finished();
    return Point(coef.row(k) * d.col(0), coef.row(k) * d.col(1)) / h;
  }
};

TestPolys complement_of_p(int r, const Triangle& tri)
{
  TestPolys t{tri.centroid(), tri.diameter(), {}};
  const auto rule = oracle::triangle_rule(tri, 6);
  Eigen::MatrixXd C = Eigen::MatrixXd::Identity(6, 6);
  auto dot = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b)
  {
    TestPolys p{t.c, t.h, Eigen::MatrixXd(2, 6)};
    p.coef.row(0) = a.transpose();
    p.coef.row(1) = b.transpose();
    double s = 0;
    for (std::size_t q = 0; q < rule.points.size(); ++q)
      s += rule.weights[q] * p.value(0, rule.points[q]) * p.value(1, rule.points[q]);
    return s;
  };
  for (int i = 0; i < 6; ++i)
  {
    Eigen::VectorXd v = C.row(i).transpose();
    for (int j = 0; j < i; ++j)
      v -= dot(v, C.row(j).transpose()) * C.row(j).transpose();
    C.row(i) = v.transpose() / std::sqrt(dot(v, v));
  }
  const int first = polyset_dim(r);
  t.coef = C.bottomRows(6 - first);
  return t;
}

// max_j,k |int div(Phi_j) q_k| relative to the size of the terms, computed
// by integration by parts from basis values only.
double divergence_residual(Family f, const Triangle& tri, int r)
{
  const TestPolys q = complement_of_p(r, tri);
  const auto vol = oracle::triangle_rule(tri, 8);
  const Tabulation tv = oracle::physical_basis(f, tri, vol.points);
  std::array<oracle::PhysRule, 3> seg;
  std::array<Tabulation, 3> ts;
  std::array<Point, 3> normals;
  for (int k = 0; k < 3; ++k)
  {
    const Point a = tri.vertices[edge_vertices[k][0]];
    const Point b = tri.vertices[edge_vertices[k][1]];
    Point n = rotate((b - a).normalized());
    if (n.dot(tri.vertices[k] - a) > 0)
      n = -n;
    normals[k] = n;
    seg[k] = oracle::segment_rule(a, b, 8);
    ts[k] = oracle::physical_basis(f, tri, seg[k].points);
  }
  const bool tensor = tv.value_size() == 3;
  const int rows = tensor ? 2 : 1;
  double worst = 0;
  for (int j = 0; j < tv.num_functions(); ++j)
  {
    // residuals of function j relative to its largest term magnitude
    double sj = 0, magj = 0;
    for (int k = 0; k < q.coef.rows(); ++k)
      for (int i = 0; i < rows; ++i)
      {
        // row i of the field: (v_0, v_1)
        auto row = [&](const Tabulation& t, int p)
        {
          const double* v = t.values_at(j, p);
          if (!tensor)
            return Point(v[0], v[1]);
          return i == 0 ? Point(v[0], v[1]) : Point(v[1], v[2]);
        };
        double s = 0, mag = 0;
        for (std::size_t p = 0; p < vol.points.size(); ++p)
        {
          const double term = vol.weights[p] * row(tv, p).dot(q.gradient(k, vol.points[p]));
          s -= term;
          mag += std::abs(term);
        }
        for (int e = 0; e < 3; ++e)
          for (std::size_t p = 0; p < seg[e].points.size(); ++p)
          {
            const double term = seg[e].weights[p] * row(ts[e], p).dot(normals[e])
                                * q.value(k, seg[e].points[p]);
            s += term;
            mag += std::abs(term);
          }
        sj = std::max(sj, std::abs(s));
        magj = std::max(magj, mag);
      }
    if (magj > 0)
      worst = std::max(worst, sj / magj);
  }
  return worst;
}

// Reference functionals applied to the reference basis.
Eigen::MatrixXd reference_kronecker(Family f)
{
  const auto e = reference_element(f);
  Eigen::MatrixXd D(e->dim(), e->dim());
  for (int i = 0; i < e->dim(); ++i)
  {
    const Tabulation t = tabulate(*e, e->functionals[i].points, 0);
    for (int j = 0; j < e->dim(); ++j)
    {
      double s = 0;
      for (int p = 0; p < t.num_points(); ++p)
        for (int c = 0; c < t.value_size(); ++c)
          s += e->functionals[i].weights(p, c) * t.value(j, p, c);
      D(i, j) = s;
    }
  }
  return D;
}

const Family piola_families[] = {Family::BDM1, Family::MTW, Family::AWnc, Family::AWc};
} // namespace

TEST_CASE("element dimensions")
{
  CHECK(reference_element(Family::BDM1)->dim() == 6);
  CHECK(reference_element(Family::MTW)->dim() == 9);
  CHECK(reference_element(Family::AWc)->dim() == 24);
  CHECK(reference_element(Family::AWnc)->dim() == 15);
  CHECK(reference_element(Family::DG0)->dim() == 1);
  CHECK(reference_element(Family::DG1)->dim() == 6);
  CHECK(constrained_space(Family::MTW).rows() == 9);
  CHECK(constrained_space(Family::AWc).rows() == 24);
  CHECK(constrained_space(Family::AWnc).rows() == 15);
}

TEST_CASE("constrained spaces have orthonormal rows")
{
  for (Family f : piola_families)
  {
    const Eigen::MatrixXd S = constrained_space(f);
    CHECK((S * S.transpose() - Eigen::MatrixXd::Identity(S.rows(), S.rows()))
              .cwiseAbs()
              .maxCoeff()
          < 1e-12);
  }
}

TEST_CASE("DOF layout")
{
  SUBCASE("MTW: normal 0, tangential 0, normal 1 per edge")
  {
    const auto e = reference_element(Family::MTW);
    const DofKind kinds[3] = {DofKind::edge_normal_moment, DofKind::edge_tangential_moment,
                              DofKind::edge_normal_moment};
    const int orders[3] = {0, 0, 1};
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
      {
        const DofDescriptor& d = e->dofs[3 * k + i];
        CHECK(d.kind == kinds[i]);
        CHECK(d.order == orders[i]);
        CHECK(d.entity_dim == 1);
        CHECK(d.entity_index == k);
      }
    CHECK(e->entity_dofs == std::array<int, 3>{0, 3, 0});
  }
  SUBCASE("AW: vertex blocks, edge blocks nn0 nt0 nn1 nt1, interior block")
  {
    for (Family f : {Family::AWc, Family::AWnc})
    {
      const auto e = reference_element(f);
      const int nv = f == Family::AWc ? 9 : 0;
      for (int i = 0; i < nv; ++i)
      {
        CHECK(e->dofs[i].kind == DofKind::vertex_component);
        CHECK(e->dofs[i].entity_index == i / 3);
        CHECK(e->dofs[i].component == i % 3);
      }
      const DofKind kinds[4] = {DofKind::edge_nn_moment, DofKind::edge_nt_moment,
                                DofKind::edge_nn_moment, DofKind::edge_nt_moment};
      for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 4; ++i)
        {
          const DofDescriptor& d = e->dofs[nv + 4 * k + i];
          CHECK(d.kind == kinds[i]);
          CHECK(d.order == i / 2);
          CHECK(d.entity_index == k);
        }
      for (int c = 0; c < 3; ++c)
      {
        const DofDescriptor& d = e->dofs[nv + 12 + c];
        CHECK(d.kind == DofKind::interior_moment);
        CHECK(d.entity_dim == 2);
        CHECK(d.component == c);
      }
      CHECK(e->entity_dofs
            == std::array<int, 3>{f == Family::AWc ? 3 : 0, 4, 3});
    }
  }
}

TEST_CASE("reference Kronecker property")
{
  for (Family f : {Family::BDM1, Family::MTW, Family::AWc, Family::AWnc, Family::DG0,
                   Family::DG1})
  {
    const Eigen::MatrixXd D = reference_kronecker(f);
    CHECK((D - Eigen::MatrixXd::Identity(D.rows(), D.cols())).cwiseAbs().maxCoeff()
          < 1e-10);
  }
  // the same with functionals built independently of the element
  for (Family f : piola_families)
  {
    const Eigen::MatrixXd V = oracle::physical_vandermonde(f, reference_triangle());
    CHECK((V - Eigen::MatrixXd::Identity(V.rows(), V.cols())).cwiseAbs().maxCoeff()
          < 1e-10);
  }
}

TEST_CASE("AW^c first vertex basis function")
{
  const auto e = reference_element(Family::AWc);
  const Triangle r = reference_triangle();
  const std::vector<Point> v(r.vertices.begin(), r.vertices.end());
  const Tabulation t = tabulate(*e, v, 0);
  CHECK(t.value(0, 0, 0) == Approx(1.0));
  CHECK(std::abs(t.value(0, 0, 1)) < 1e-10);
  CHECK(std::abs(t.value(0, 0, 2)) < 1e-10);
  for (int p = 1; p < 3; ++p)
    for (int c = 0; c < 3; ++c)
      CHECK(std::abs(t.value(0, p, c)) < 1e-10);
  // the remaining 23 functionals vanish on it
  const Eigen::MatrixXd V = oracle::physical_vandermonde(Family::AWc, r);
  for (int i = 1; i < 24; ++i)
    CHECK(std::abs(V(i, 0)) < 1e-10);
}

TEST_CASE("MTW tangential basis function has no normal moments")
{
  const Eigen::MatrixXd V = oracle::physical_vandermonde(Family::MTW, reference_triangle());
  for (int k = 0; k < 3; ++k)
  {
    const int j = 3 * k + 1;
    for (int e = 0; e < 3; ++e)
    {
      CHECK(std::abs(V(3 * e, j)) < 1e-10);
      CHECK(std::abs(V(3 * e + 2, j)) < 1e-10);
    }
  }
}

TEST_CASE("divergence constraints on the reference cell")
{
  const Triangle r = reference_triangle();
  CHECK(divergence_residual(Family::MTW, r, 0) < 1e-10);
  CHECK(divergence_residual(Family::AWc, r, 1) < 1e-10);
  // BDM1 divergence is constant as well
  CHECK(divergence_residual(Family::BDM1, r, 0) < 1e-10);
  // the oracle detects non-constant divergence: AW^c is richer than P0
  CHECK(divergence_residual(Family::AWc, r, 0) > 1e-3);
}

TEST_CASE("divergence constraints survive the transformation")
{
  std::mt19937_64 rng(8);
  for (int i = 0; i < 20; ++i)
  {
    const Triangle t = oracle::random_triangle(rng);
    CHECK(divergence_residual(Family::MTW, t, 0) < 1e-9);
    CHECK(divergence_residual(Family::AWc, t, 1) < 1e-9);
  }
}

TEST_CASE("MTW divergence is constant at quadrature points")
{
  const auto e = reference_element(Family::MTW);
  const QuadratureRule& rule = quadrature(Domain::triangle, 6);
  const Tabulation t = tabulate(*e, rule.points, 1);
  for (int j = 0; j < e->dim(); ++j)
  {
    double lo = 1e300, hi = -1e300;
    for (int q = 0; q < t.num_points(); ++q)
    {
      const double d = t.gradient(j, q, 0, 0) + t.gradient(j, q, 1, 1);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    CHECK(hi - lo < 1e-10);
  }
}

TEST_CASE("constants lie in the vector and tensor spaces")
{
  std::mt19937_64 rng(5);
  for (Family f : piola_families)
    for (int trial = 0; trial < 5; ++trial)
    {
      const Triangle tri = trial == 0 ? reference_triangle() : oracle::random_triangle(rng);
      const int vs = f == Family::AWc || f == Family::AWnc ? 3 : 2;
      const Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(vs, 0.7, -1.3);
      // oracle DOFs of the constant field
      const auto ls = oracle::physical_functionals(f, tri);
      Eigen::VectorXd dofs(ls.size());
      for (std::size_t i = 0; i < ls.size(); ++i)
        dofs[i] = ls[i].weights.colwise().sum().dot(c);
      const std::vector<Point> x{tri.centroid(), 0.5 * (tri.vertices[0] + tri.vertices[1]),
                                 0.2 * tri.vertices[0] + 0.7 * tri.vertices[1]
                                     + 0.1 * tri.vertices[2]};
      const Tabulation t = oracle::physical_basis(f, tri, x);
      for (int p = 0; p < t.num_points(); ++p)
        for (int k = 0; k < vs; ++k)
        {
          double s = 0;
          for (int j = 0; j < t.num_functions(); ++j)
            s += dofs[j] * t.value(j, p, k);
          CHECK(s == Approx(c[k]).epsilon(1e-9));
        }
    }
}

TEST_CASE("DG0 tabulates to one")
{
  const auto e = reference_element(Family::DG0);
  const std::vector<Point> x{Point(0, 0), Point(0.3, 0.3), Point(1, 0)};
  const Tabulation t = tabulate(*e, x, 0);
  for (int p = 0; p < 3; ++p)
    CHECK(t.value(0, p, 0) == Approx(1.0));
}

TEST_CASE("family names round-trip")
{
  for (Family f : {Family::BDM1, Family::MTW, Family::AWc, Family::AWnc, Family::DG0,
                   Family::DG1})
    CHECK(family_from_name(family_name(f)) == f);
  CHECK_THROWS(family_from_name("rt0"));
}
