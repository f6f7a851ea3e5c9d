#include "piolafe/assembly.hpp"
#include "piolafe/errors.hpp"
#include "piolafe/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

namespace piolafe
{

namespace
{

using Triplet = Eigen::Triplet<double>;

struct Accumulator
{
  std::vector<Triplet> triplets;
  Eigen::VectorXd rhs;
};

// Run body(cell, acc) over all cells, possibly threaded and shuffled, and
// return the combined matrix and vector.
template <typename Body>
void cell_loop(int ncells, int n, const AssemblyOptions& opts, Body&& body,
               SparseMatrix& A, Eigen::VectorXd& b)
{
  std::vector<int> order(ncells);
  std::iota(order.begin(), order.end(), 0);
  if (opts.shuffle)
  {
    std::mt19937_64 rng(opts.seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  const int nt = std::max(1, std::min(opts.threads, std::max(ncells, 1)));
  std::vector<Accumulator> acc(nt);
  for (auto& a : acc)
    a.rhs = Eigen::VectorXd::Zero(n);
  auto work = [&](int t)
  {
    for (int i = t; i < ncells; i += nt)
      body(order[i], acc[t]);
  };
  if (nt == 1)
    work(0);
  else
  {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
      pool.emplace_back(work, t);
    for (auto& th : pool)
      th.join();
  }
  std::vector<Triplet> all;
  b = Eigen::VectorXd::Zero(n);
  for (auto& a : acc)
  {
    all.insert(all.end(), a.triplets.begin(), a.triplets.end());
    b += a.rhs;
  }
  A.resize(n, n);
  A.setFromTriplets(all.begin(), all.end());
}

void add_block(std::vector<Triplet>& t, std::span<const int> rows, int roff,
               std::span<const int> cols, int coff, const Eigen::MatrixXd& K)
{
  for (int i = 0; i < K.rows(); ++i)
    for (int j = 0; j < K.cols(); ++j)
      if (K(i, j) != 0.0)
        t.emplace_back(roff + rows[i], coff + cols[j], K(i, j));
}

// Frobenius product of stored symmetric components
inline double frob(const double* a, const double* b)
{
  return a[0] * b[0] + 2.0 * a[1] * b[1] + a[2] * b[2];
}

inline double dot_weighted(ValueShape s, const double* a, const double* b)
{
  if (s == ValueShape::symmetric)
    return frob(a, b);
  double r = 0.0;
  for (int c = 0; c < value_size(s); ++c)
    r += a[c] * b[c];
  return r;
}

// Div of a stored symmetric tensor from its gradient entries [c][d]
inline Point tensor_div(const double* g)
{
  return Point(g[0] + g[3], g[2] + g[5]);
}

// tau n for stored components
inline Point tensor_normal(const double* t, const Point& n)
{
  return Point(t[0] * n.x() + t[1] * n.y(), t[1] * n.x() + t[2] * n.y());
}

struct EdgeSide
{
  int cell;
  int local;
};

EdgeSide boundary_side(const Mesh& m, int e)
{
  const int c = m.edge_cells(e)[0];
  for (int k = 0; k < 3; ++k)
    if (m.cell_edge(c, k) == e)
      return {c, k};
  throw Error("edge not found in its cell");
}

// Reference points of an interval rule on local edge k
std::vector<Point> reference_edge_points(int k, const QuadratureRule& rule)
{
  const Triangle ref = reference_triangle();
  const Point a = ref.vertices[edge_vertices[k][0]];
  const Point d = ref.vertices[edge_vertices[k][1]] - a;
  std::vector<Point> pts;
  for (const Point& s : rule.points)
    pts.push_back(a + s.x() * d);
  return pts;
}

bool contains(const std::vector<int>& v, int x)
{
  return std::find(v.begin(), v.end(), x) != v.end();
}

void check_tags(const Mesh& m, const ProblemSpec& spec)
{
  for (int e = 0; e < m.num_edges(); ++e)
    if (m.is_boundary_edge(e) && !contains(spec.dirichlet_tags, m.edge_tag(e))
        && !contains(spec.neumann_tags, m.edge_tag(e)))
      throw InconsistentBoundaryTags("boundary tag "
                                     + std::to_string(m.edge_tag(e))
                                     + " is neither essential nor natural");
  for (int t : spec.dirichlet_tags)
    if (contains(spec.neumann_tags, t))
      throw InconsistentBoundaryTags("tag " + std::to_string(t)
                                     + " is both essential and natural");
}

} // namespace

//-----------------------------------------------------------------------------
FieldFunction vector_field(const VectorField& f)
{
  return [f](const Point& x, double* out)
  {
    const Point v = f(x);
    out[0] = v.x();
    out[1] = v.y();
  };
}
//-----------------------------------------------------------------------------
FieldFunction tensor_field(const TensorField& f)
{
  return [f](const Point& x, double* out)
  {
    const Mat2 t = f(x);
    out[0] = t(0, 0);
    out[1] = 0.5 * (t(0, 1) + t(1, 0));
    out[2] = t(1, 1);
  };
}
//-----------------------------------------------------------------------------
FieldFunction scalar_field(const ScalarField& f)
{
  return [f](const Point& x, double* out) { out[0] = f(x); };
}
//-----------------------------------------------------------------------------
Point outward_normal(const Mesh& m, int e)
{
  const auto [c, k] = boundary_side(m, e);
  const auto& ev = m.edges()[e];
  const Point t = (m.vertices()[ev[1]] - m.vertices()[ev[0]]).normalized();
  Point n = rotate(t);
  const Point opp = m.vertices()[m.cells()[c][k]];
  if (n.dot(m.edge_midpoint(e) - opp) < 0.0)
    n = -n;
  return n;
}
//-----------------------------------------------------------------------------
namespace
{
/// Unscaled physical functional i of cell `map` applied to f.
double apply_functional(const ReferenceElement& el, int i, const AffineCellMap& map,
                        const std::array<EdgeFrame, 3>& frames, const FieldFunction& f)
{
  const QuadratureRule& line = quadrature(Domain::interval, 12);
  const QuadratureRule& tri = quadrature(Domain::triangle, 12);
  std::array<double, 3> val{};
  const DofDescriptor& d = el.dofs[i];
  double r = 0.0;
  switch (d.kind)
  {
  case DofKind::vertex_component:
    f(map.target.vertices[d.entity_index], val.data());
    return val[d.component];
  case DofKind::point_value:
    f(map(el.functionals[i].points[0]), val.data());
    return val[d.component];
  case DofKind::interior_moment:
    for (std::size_t q = 0; q < tri.points.size(); ++q)
    {
      f(map(tri.points[q]), val.data());
      r += tri.weights[q] * 2.0 * map.target.area() * val[d.component];
    }
    return r;
  default:
    break;
  }
  const EdgeFrame& fr = frames[d.entity_index];
  const Point a = map.target.vertices[edge_vertices[d.entity_index][0]];
  const Point& n = fr.normal;
  const Point& t = fr.tangent;
  for (std::size_t q = 0; q < line.points.size(); ++q)
  {
    const double s = line.points[q].x();
    f(a + s * fr.vector, val.data());
    double w = 0.0;
    switch (d.kind)
    {
    case DofKind::edge_normal_moment:
      w = val[0] * n.x() + val[1] * n.y();
      break;
    case DofKind::edge_tangential_moment:
      w = val[0] * t.x() + val[1] * t.y();
      break;
    case DofKind::edge_nn_moment:
      w = tensor_normal(val.data(), n).dot(n);
      break;
    case DofKind::edge_nt_moment:
      w = tensor_normal(val.data(), n).dot(t);
      break;
    default:
      break;
    }
    r += fr.length * line.weights[q] * shifted_legendre(d.order, s) * w;
  }
  return r;
}
} // namespace
//-----------------------------------------------------------------------------
Eigen::VectorXd interpolate(const GlobalSpace& V, const FieldFunction& f)
{
  const Mesh& m = V.mesh();
  const ReferenceElement& el = V.element();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(V.num_dofs());
  std::vector<char> done(V.num_dofs(), 0);
  for (int c = 0; c < m.num_cells(); ++c)
  {
    const auto dofs = V.cell_dofs(c);
    const AffineCellMap map = V.cell_map(c);
    const auto frames = edge_frames(map);
    for (int i = 0; i < el.dim(); ++i)
    {
      const int g = dofs[i];
      if (done[g])
        continue;
      done[g] = 1;
      x[g] = apply_functional(el, i, map, frames, f) / V.dof_scaling(g);
    }
  }
  return x;
}
//-----------------------------------------------------------------------------
SparseMatrix p1_interpolation(const GlobalSpace& V)
{
  const Mesh& m = V.mesh();
  const ReferenceElement& el = V.element();
  const int vs = el.value_size();
  std::vector<char> done(V.num_dofs(), 0);
  std::vector<Triplet> t;
  for (int c = 0; c < m.num_cells(); ++c)
  {
    const auto dofs = V.cell_dofs(c);
    const auto cv = m.cells()[c];
    const AffineCellMap map = V.cell_map(c);
    const auto frames = edge_frames(map);
    for (int i = 0; i < el.dim(); ++i)
    {
      const int g = dofs[i];
      if (done[g])
        continue;
      done[g] = 1;
      for (int a = 0; a < 3; ++a)
        for (int k = 0; k < vs; ++k)
        {
          const FieldFunction hat = [&](const Point& x, double* out)
          {
            const Point xh = map.pullback_point(x);
            const double lam = a == 0 ? 1.0 - xh.x() - xh.y() : (a == 1 ? xh.x() : xh.y());
            for (int j = 0; j < vs; ++j)
              out[j] = j == k ? lam : 0.0;
          };
          const double v = apply_functional(el, i, map, frames, hat) / V.dof_scaling(g);
          if (std::abs(v) > 1e-14)
            t.emplace_back(g, vs * cv[a] + k, v);
        }
    }
  }
  SparseMatrix P(V.num_dofs(), vs * m.num_vertices());
  P.setFromTriplets(t.begin(), t.end());
  return P;
}
//-----------------------------------------------------------------------------
void apply_essential(LinearSystem& sys, const std::vector<int>& dofs,
                     const Eigen::VectorXd& values)
{
  const int n = sys.size();
  std::vector<char> fixed(n, 0);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < dofs.size(); ++i)
  {
    fixed[dofs[i]] = 1;
    g[dofs[i]] = values[i];
  }
  sys.rhs -= sys.matrix * g;
  std::vector<Triplet> t;
  t.reserve(sys.matrix.nonZeros());
  for (int k = 0; k < sys.matrix.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(sys.matrix, k); it; ++it)
      if (!fixed[it.row()] && !fixed[it.col()])
        t.emplace_back(it.row(), it.col(), it.value());
  for (int d : dofs)
  {
    t.emplace_back(d, d, 1.0);
  }
  for (int i = 0; i < n; ++i)
    if (fixed[i])
      sys.rhs[i] = g[i];
  sys.matrix.setFromTriplets(t.begin(), t.end());
  sys.constrained_dofs.insert(sys.constrained_dofs.end(), dofs.begin(), dofs.end());
  Eigen::VectorXd old = sys.constrained_values;
  sys.constrained_values.resize(old.size() + values.size());
  sys.constrained_values << old, values;
}
//-----------------------------------------------------------------------------
SparseMatrix assemble_mass(const GlobalSpace& V, const AssemblyOptions& opts)
{
  const QuadratureRule& rule = quadrature(Domain::triangle, form_degree(V));
  const Tabulation ref = tabulate(V.element(), rule.points, 0);
  const ValueShape shape = V.element().shape;
  const int nl = V.local_dim();
  SparseMatrix A;
  Eigen::VectorXd b;
  cell_loop(
      V.mesh().num_cells(), V.num_dofs(), opts,
      [&](int c, Accumulator& acc)
      {
        const Tabulation t = V.cell_basis(c, ref);
        const double det = std::abs(V.mesh().cell_triangle(c).signed_double_area());
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nl, nl);
        for (int q = 0; q < t.num_points(); ++q)
        {
          const double w = rule.weights[q] * det;
          for (int i = 0; i < nl; ++i)
            for (int j = i; j < nl; ++j)
              K(i, j) += w * dot_weighted(shape, t.values_at(i, q), t.values_at(j, q));
        }
        K.triangularView<Eigen::StrictlyLower>() = K.transpose();
        const auto d = V.cell_dofs(c);
        add_block(acc.triplets, d, 0, d, 0, K);
      },
      A, b);
  return A;
}
//-----------------------------------------------------------------------------
SparseMatrix assemble_divergence(const GlobalSpace& V, const GlobalSpace& Q,
                                 const AssemblyOptions& opts)
{
  const QuadratureRule& rule = quadrature(Domain::triangle, form_degree(V));
  const Tabulation ref = tabulate(V.element(), rule.points, 1);
  const Tabulation qref = tabulate(Q.element(), rule.points, 0);
  const int nv = V.local_dim(), nq = Q.local_dim();
  const int n = V.num_dofs() + Q.num_dofs();
  SparseMatrix A;
  Eigen::VectorXd b;
  cell_loop(
      V.mesh().num_cells(), n, opts,
      [&](int c, Accumulator& acc)
      {
        const Tabulation t = V.cell_basis(c, ref);
        const Tabulation tq = Q.cell_basis(c, qref);
        const double det = std::abs(V.mesh().cell_triangle(c).signed_double_area());
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nq, nv);
        for (int q = 0; q < t.num_points(); ++q)
        {
          const double w = rule.weights[q] * det;
          for (int j = 0; j < nv; ++j)
          {
            const double div = t.gradient(j, q, 0, 0) + t.gradient(j, q, 1, 1);
            for (int k = 0; k < nq; ++k)
              B(k, j) += w * tq.value(k, q, 0) * div;
          }
        }
        add_block(acc.triplets, Q.cell_dofs(c), 0, V.cell_dofs(c), 0, B);
      },
      A, b);
  return A.topLeftCorner(Q.num_dofs(), V.num_dofs());
}
//-----------------------------------------------------------------------------
LinearSystem assemble_mtw_stokes_darcy(const GlobalSpace& V, const GlobalSpace& Q,
                                       const ProblemSpec& spec,
                                       const AssemblyOptions& opts)
{
  const Mesh& m = V.mesh();
  check_tags(m, spec);
  const QuadratureRule& rule = quadrature(Domain::triangle, form_degree(V));
  const Tabulation ref = tabulate(V.element(), rule.points, 1);
  const Tabulation qref = tabulate(Q.element(), rule.points, 0);
  const int nv = V.local_dim(), nq = Q.local_dim();
  const int nV = V.num_dofs();
  const double e2 = spec.eps * spec.eps;

  LinearSystem sys;
  sys.primary_size = nV;
  sys.secondary_size = Q.num_dofs();
  cell_loop(
      m.num_cells(), sys.size(), opts,
      [&](int c, Accumulator& acc)
      {
        const AffineCellMap map = V.cell_map(c);
        const Tabulation t = V.cell_basis(c, ref);
        const Tabulation tq = Q.cell_basis(c, qref);
        const double det = std::abs(map.detJ);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nv, nv);
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nq, nv);
        Eigen::VectorXd fv = Eigen::VectorXd::Zero(nv), gq = Eigen::VectorXd::Zero(nq);
        for (int q = 0; q < t.num_points(); ++q)
        {
          const double w = rule.weights[q] * det;
          const Point x = map(rule.points[q]);
          const Point f = spec.f(x);
          const double g = spec.g ? spec.g(x) : 0.0;
          for (int i = 0; i < nv; ++i)
          {
            const double* vi = t.values_at(i, q);
            const double* gi = t.gradients_at(i, q);
            for (int j = i; j < nv; ++j)
            {
              const double* vj = t.values_at(j, q);
              const double* gj = t.gradients_at(j, q);
              A(i, j) += w * (vi[0] * vj[0] + vi[1] * vj[1]
                              + e2 * (gi[0] * gj[0] + gi[1] * gj[1] + gi[2] * gj[2]
                                      + gi[3] * gj[3]));
            }
            const double div = gi[0] + gi[3];
            for (int k = 0; k < nq; ++k)
              B(k, i) -= w * tq.value(k, q, 0) * div;
            fv[i] += w * (f.x() * vi[0] + f.y() * vi[1]);
          }
          for (int k = 0; k < nq; ++k)
            gq[k] -= w * tq.value(k, q, 0) * g;
        }
        A.triangularView<Eigen::StrictlyLower>() = A.transpose();
        const auto dv = V.cell_dofs(c);
        const auto dq = Q.cell_dofs(c);
        add_block(acc.triplets, dv, 0, dv, 0, A);
        add_block(acc.triplets, dq, nV, dv, 0, B);
        add_block(acc.triplets, dv, 0, dq, nV, B.transpose());
        for (int i = 0; i < nv; ++i)
          acc.rhs[dv[i]] += fv[i];
        for (int k = 0; k < nq; ++k)
          acc.rhs[nV + dq[k]] += gq[k];
      },
      sys.matrix, sys.rhs);

  // natural boundary: int K n . v
  if (spec.K)
  {
    const QuadratureRule& line = quadrature(Domain::interval, form_degree(V));
    for (int e = 0; e < m.num_edges(); ++e)
    {
      if (!m.is_boundary_edge(e) || !contains(spec.neumann_tags, m.edge_tag(e)))
        continue;
      const auto [c, k] = boundary_side(m, e);
      const auto pts = reference_edge_points(k, line);
      const Tabulation t = V.cell_basis(c, tabulate(V.element(), pts, 0));
      const AffineCellMap map = V.cell_map(c);
      const Point n = outward_normal(m, e);
      const double len = m.edge_length(e);
      const auto dv = V.cell_dofs(c);
      for (int q = 0; q < t.num_points(); ++q)
      {
        const Point Kn = spec.K(map(pts[q])) * n;
        for (int i = 0; i < nv; ++i)
          sys.rhs[dv[i]] += len * line.weights[q]
                            * (Kn.x() * t.value(i, q, 0) + Kn.y() * t.value(i, q, 1));
      }
    }
  }

  const std::vector<int> fixed = V.boundary_dofs(spec.dirichlet_tags);
  const Eigen::VectorXd jh = interpolate(V, vector_field(spec.j));
  Eigen::VectorXd vals(fixed.size());
  for (std::size_t i = 0; i < fixed.size(); ++i)
    vals[i] = jh[fixed[i]];
  apply_essential(sys, fixed, vals);
  return sys;
}
//-----------------------------------------------------------------------------
LinearSystem assemble_mtw_primal_elasticity(const GlobalSpace& V,
                                            const ProblemSpec& spec,
                                            const AssemblyOptions& opts)
{
  const Mesh& m = V.mesh();
  check_tags(m, spec);
  const QuadratureRule& rule = quadrature(Domain::triangle, form_degree(V));
  const Tabulation ref = tabulate(V.element(), rule.points, 1);
  const int nv = V.local_dim();
  const double mu = spec.elasticity.mu;
  const double lam = spec.elasticity.lambda();

  LinearSystem sys;
  sys.primary_size = V.num_dofs();
  cell_loop(
      m.num_cells(), sys.size(), opts,
      [&](int c, Accumulator& acc)
      {
        const AffineCellMap map = V.cell_map(c);
        const Tabulation t = V.cell_basis(c, ref);
        const double det = std::abs(map.detJ);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nv, nv);
        Eigen::VectorXd fv = Eigen::VectorXd::Zero(nv);
        std::vector<std::array<double, 4>> eps(nv);
        for (int q = 0; q < t.num_points(); ++q)
        {
          const double w = rule.weights[q] * det;
          const Point f = spec.f(map(rule.points[q]));
          for (int i = 0; i < nv; ++i)
          {
            const double* g = t.gradients_at(i, q);
            // eps11, eps12, eps22, div
            eps[i] = {g[0], 0.5 * (g[1] + g[2]), g[3], g[0] + g[3]};
            fv[i] += w * (f.x() * t.value(i, q, 0) + f.y() * t.value(i, q, 1));
          }
          for (int i = 0; i < nv; ++i)
            for (int j = i; j < nv; ++j)
              A(i, j) += w * (2 * mu * frob(eps[i].data(), eps[j].data())
                              + lam * eps[i][3] * eps[j][3]);
        }
        A.triangularView<Eigen::StrictlyLower>() = A.transpose();
        const auto dv = V.cell_dofs(c);
        add_block(acc.triplets, dv, 0, dv, 0, A);
        for (int i = 0; i < nv; ++i)
          acc.rhs[dv[i]] += fv[i];
      },
      sys.matrix, sys.rhs);

  const std::vector<int> fixed = V.boundary_dofs(spec.dirichlet_tags);
  Eigen::VectorXd vals = Eigen::VectorXd::Zero(fixed.size());
  if (spec.j)
  {
    const Eigen::VectorXd jh = interpolate(V, vector_field(spec.j));
    for (std::size_t i = 0; i < fixed.size(); ++i)
      vals[i] = jh[fixed[i]];
  }
  apply_essential(sys, fixed, vals);
  return sys;
}
//-----------------------------------------------------------------------------
namespace
{
LinearSystem hr_system(const GlobalSpace& S, const GlobalSpace& U,
                       const ProblemSpec& spec, double alpha, bool nitsche,
                       const AssemblyOptions& opts)
{
  const Mesh& m = S.mesh();
  check_tags(m, spec);
  const QuadratureRule& rule = quadrature(Domain::triangle, form_degree(S));
  const Tabulation ref = tabulate(S.element(), rule.points, 1);
  const Tabulation uref = tabulate(U.element(), rule.points, 0);
  const int ns = S.local_dim(), nu = U.local_dim();
  const int nS = S.num_dofs();
  const double mu = spec.elasticity.mu;
  const double lam = spec.elasticity.lambda();
  const double kappa = lam / (2 * mu + 2 * lam);

  LinearSystem sys;
  sys.primary_size = nS;
  sys.secondary_size = U.num_dofs();
  cell_loop(
      m.num_cells(), sys.size(), opts,
      [&](int c, Accumulator& acc)
      {
        const AffineCellMap map = S.cell_map(c);
        const Tabulation t = S.cell_basis(c, ref);
        const Tabulation tu = U.cell_basis(c, uref);
        const double det = std::abs(map.detJ);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ns, ns);
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nu, ns);
        Eigen::VectorXd fs = Eigen::VectorXd::Zero(ns), fu = Eigen::VectorXd::Zero(nu);
        std::vector<Point> div(ns);
        for (int q = 0; q < t.num_points(); ++q)
        {
          const double w = rule.weights[q] * det;
          const Point x = map(rule.points[q]);
          const Point f = spec.f ? spec.f(x) : Point(0, 0);
          double r[3] = {0, 0, 0};
          if (spec.residual)
          {
            const Mat2 R = spec.residual(x);
            r[0] = R(0, 0);
            r[1] = 0.5 * (R(0, 1) + R(1, 0));
            r[2] = R(1, 1);
          }
          for (int i = 0; i < ns; ++i)
          {
            div[i] = tensor_div(t.gradients_at(i, q));
            const double* ti = t.values_at(i, q);
            fs[i] += w * (frob(r, ti) + alpha * f.dot(div[i]));
          }
          for (int i = 0; i < ns; ++i)
          {
            const double* ti = t.values_at(i, q);
            const double tri = ti[0] + ti[2];
            for (int j = i; j < ns; ++j)
            {
              const double* tj = t.values_at(j, q);
              A(i, j) += w * ((frob(ti, tj) - kappa * tri * (tj[0] + tj[2])) / (2 * mu)
                              + alpha * div[i].dot(div[j]));
            }
          }
          for (int k = 0; k < nu; ++k)
          {
            const Point v(tu.value(k, q, 0), tu.value(k, q, 1));
            for (int j = 0; j < ns; ++j)
              B(k, j) += w * div[j].dot(v);
            fu[k] += w * f.dot(v);
          }
        }
        A.triangularView<Eigen::StrictlyLower>() = A.transpose();
        const auto ds = S.cell_dofs(c);
        const auto du = U.cell_dofs(c);
        add_block(acc.triplets, ds, 0, ds, 0, A);
        add_block(acc.triplets, du, nS, ds, 0, B);
        add_block(acc.triplets, ds, 0, du, nS, B.transpose());
        for (int i = 0; i < ns; ++i)
          acc.rhs[ds[i]] += fs[i];
        for (int k = 0; k < nu; ++k)
          acc.rhs[nS + du[k]] += fu[k];
      },
      sys.matrix, sys.rhs);

  // boundary terms
  const QuadratureRule& line = quadrature(Domain::interval, form_degree(S));
  std::vector<Triplet> bt;
  for (int e = 0; e < m.num_edges(); ++e)
  {
    if (!m.is_boundary_edge(e))
      continue;
    const bool dir = contains(spec.dirichlet_tags, m.edge_tag(e));
    if (!dir && !nitsche)
      continue;
    const auto [c, k] = boundary_side(m, e);
    const auto pts = reference_edge_points(k, line);
    const Tabulation t = S.cell_basis(c, tabulate(S.element(), pts, 0));
    const Tabulation tu = U.cell_basis(c, tabulate(U.element(), pts, 0));
    const AffineCellMap map = S.cell_map(c);
    const Point n = outward_normal(m, e);
    const double len = m.edge_length(e);
    const auto ds = S.cell_dofs(c);
    const auto du = U.cell_dofs(c);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ns, ns);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nu, ns);
    for (int q = 0; q < t.num_points(); ++q)
    {
      const double w = len * line.weights[q];
      const Point x = map(pts[q]);
      if (dir)
      {
        const Point u0 = spec.u0 ? spec.u0(x) : Point(0, 0);
        for (int i = 0; i < ns; ++i)
          sys.rhs[ds[i]] += w * tensor_normal(t.values_at(i, q), n).dot(u0);
        continue;
      }
      const Point g = spec.traction ? spec.traction(x) : Point(0, 0);
      const double pen = spec.gamma / len;
      for (int i = 0; i < ns; ++i)
      {
        const Point ti = tensor_normal(t.values_at(i, q), n);
        for (int j = 0; j < ns; ++j)
          A(i, j) += w * pen * ti.dot(tensor_normal(t.values_at(j, q), n));
        for (int kk = 0; kk < nu; ++kk)
          B(kk, i) -= w * ti.dot(Point(tu.value(kk, q, 0), tu.value(kk, q, 1)));
        sys.rhs[ds[i]] += w * pen * g.dot(ti);
      }
      for (int kk = 0; kk < nu; ++kk)
        sys.rhs[nS + du[kk]] -= w * g.dot(Point(tu.value(kk, q, 0), tu.value(kk, q, 1)));
    }
    if (!dir)
    {
      add_block(bt, ds, 0, ds, 0, A);
      add_block(bt, du, nS, ds, 0, B);
      add_block(bt, ds, 0, du, nS, B.transpose());
    }
  }
  if (!bt.empty())
  {
    SparseMatrix Bm(sys.size(), sys.size());
    Bm.setFromTriplets(bt.begin(), bt.end());
    sys.matrix += Bm;
  }
  return sys;
}
} // namespace
//-----------------------------------------------------------------------------
LinearSystem assemble_hr(const GlobalSpace& S, const GlobalSpace& U,
                         const ProblemSpec& spec, const AssemblyOptions& opts)
{
  if (!spec.neumann_tags.empty())
    throw InconsistentBoundaryTags("pure displacement problem with traction tags");
  return hr_system(S, U, spec, 0.0, false, opts);
}
//-----------------------------------------------------------------------------
LinearSystem assemble_hr_nitsche(const GlobalSpace& S, const GlobalSpace& U,
                                 const ProblemSpec& spec, const AssemblyOptions& opts)
{
  if (spec.gamma < 1.0)
    throw Error("Nitsche parameter must be at least 1");
  if (spec.alpha < 0.0)
    throw Error("augmentation parameter must be non-negative");
  return hr_system(S, U, spec, spec.alpha, true, opts);
}
//-----------------------------------------------------------------------------
double l2_error(const GlobalSpace& V, const Eigen::VectorXd& coeffs,
                const FieldFunction& exact, int degree)
{
  const QuadratureRule& rule = quadrature(Domain::triangle, degree);
  const Tabulation ref = tabulate(V.element(), rule.points, 0);
  const ValueShape shape = V.element().shape;
  const int vs = V.element().value_size();
  std::vector<double> ex(vs, 0.0), diff(vs);
  double s = 0.0;
  for (int c = 0; c < V.mesh().num_cells(); ++c)
  {
    const AffineCellMap map = V.cell_map(c);
    const Tabulation t = V.cell_basis(c, ref);
    const auto dofs = V.cell_dofs(c);
    for (int q = 0; q < t.num_points(); ++q)
    {
      if (exact)
        exact(map(rule.points[q]), ex.data());
      for (int k = 0; k < vs; ++k)
      {
        double v = 0.0;
        for (int i = 0; i < t.num_functions(); ++i)
          v += coeffs[dofs[i]] * t.value(i, q, k);
        diff[k] = v - ex[k];
      }
      s += rule.weights[q] * std::abs(map.detJ)
           * dot_weighted(shape, diff.data(), diff.data());
    }
  }
  return std::sqrt(s);
}
//-----------------------------------------------------------------------------
double div_error(const GlobalSpace& S, const Eigen::VectorXd& coeffs,
                 const VectorField& exact_div, int degree)
{
  const QuadratureRule& rule = quadrature(Domain::triangle, degree);
  const Tabulation ref = tabulate(S.element(), rule.points, 1);
  double s = 0.0;
  for (int c = 0; c < S.mesh().num_cells(); ++c)
  {
    const AffineCellMap map = S.cell_map(c);
    const Tabulation t = S.cell_basis(c, ref);
    const auto dofs = S.cell_dofs(c);
    for (int q = 0; q < t.num_points(); ++q)
    {
      Point d(0, 0);
      for (int i = 0; i < t.num_functions(); ++i)
        d += coeffs[dofs[i]] * tensor_div(t.gradients_at(i, q));
      if (exact_div)
        d -= exact_div(map(rule.points[q]));
      s += rule.weights[q] * std::abs(map.detJ) * d.squaredNorm();
    }
  }
  return std::sqrt(s);
}
//-----------------------------------------------------------------------------
double traction_residual(const GlobalSpace& S, const Eigen::VectorXd& coeffs,
                         const std::vector<int>& tags, const VectorField& g)
{
  const Mesh& m = S.mesh();
  const QuadratureRule& line = quadrature(Domain::interval, 10);
  std::array<Tabulation, 3> ref;
  for (int k = 0; k < 3; ++k)
    ref[k] = tabulate(S.element(), reference_edge_points(k, line), 0);
  double s = 0.0;
  for (int e = 0; e < m.num_edges(); ++e)
  {
    if (!m.is_boundary_edge(e) || !contains(tags, m.edge_tag(e)))
      continue;
    const auto [c, k] = boundary_side(m, e);
    const Tabulation t = S.cell_basis(c, ref[k]);
    const AffineCellMap map = S.cell_map(c);
    const Point n = outward_normal(m, e);
    const double len = m.edge_length(e);
    const auto dofs = S.cell_dofs(c);
    const auto pts = reference_edge_points(k, line);
    for (int q = 0; q < t.num_points(); ++q)
    {
      Point r(0, 0);
      for (int i = 0; i < t.num_functions(); ++i)
        r += coeffs[dofs[i]] * tensor_normal(t.values_at(i, q), n);
      if (g)
        r -= g(map(pts[q]));
      s += len * line.weights[q] * r.squaredNorm();
    }
  }
  return std::sqrt(s);
}
//-----------------------------------------------------------------------------
ErrorRecord compute_errors(const Eigen::VectorXd& x, const ProblemSpec& spec,
                           const GlobalSpace& primary, const GlobalSpace* secondary)
{
  ErrorRecord r;
  const int n0 = primary.num_dofs();
  const Eigen::VectorXd x0 = x.head(n0);
  switch (spec.kind)
  {
  case ProblemKind::mtw_stokes_darcy:
    r.u = l2_error(primary, x0, spec.u ? vector_field(spec.u) : FieldFunction());
    if (secondary)
      r.p = l2_error(*secondary, x.segment(n0, secondary->num_dofs()),
                     spec.p ? scalar_field(spec.p) : FieldFunction());
    break;
  case ProblemKind::mtw_primal_elasticity:
    r.u = l2_error(primary, x0, spec.u ? vector_field(spec.u) : FieldFunction());
    break;
  case ProblemKind::hr_displacement:
  case ProblemKind::hr_nitsche:
    r.sigma = l2_error(primary, x0,
                       spec.sigma ? tensor_field(spec.sigma) : FieldFunction());
    r.div_sigma = div_error(primary, x0, spec.f);
    if (secondary)
      r.u = l2_error(*secondary, x.segment(n0, secondary->num_dofs()),
                     spec.u ? vector_field(spec.u) : FieldFunction());
    if (!spec.neumann_tags.empty())
      r.traction = traction_residual(primary, x0, spec.neumann_tags, spec.traction);
    break;
  }
  return r;
}
//-----------------------------------------------------------------------------

} // namespace piolafe
