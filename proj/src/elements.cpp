#include "piolafe/elements.hpp"
#include "piolafe/errors.hpp"

#include <mutex>

namespace piolafe
{

//-----------------------------------------------------------------------------
std::string family_name(Family f)
{
  switch (f)
  {
  case Family::BDM1:
    return "bdm1";
  case Family::MTW:
    return "mtw";
  case Family::AWc:
    return "awc";
  case Family::AWnc:
    return "awnc";
  case Family::DG0:
    return "dg0";
  case Family::DG1:
    return "dg1";
  }
  return "?";
}
//-----------------------------------------------------------------------------
Family family_from_name(const std::string& name)
{
  for (Family f : {Family::BDM1, Family::MTW, Family::AWc, Family::AWnc,
                   Family::DG0, Family::DG1})
    if (family_name(f) == name)
      return f;
  throw Error("unknown element family '" + name + "'");
}
//-----------------------------------------------------------------------------
double apply(const Functional& l,
             const std::function<void(const Point&, double*)>& f)
{
  std::vector<double> v(l.weights.cols());
  double r = 0.0;
  for (std::size_t q = 0; q < l.points.size(); ++q)
  {
    f(l.points[q], v.data());
    for (int c = 0; c < l.weights.cols(); ++c)
      r += l.weights(q, c) * v[c];
  }
  return r;
}
//-----------------------------------------------------------------------------
int ReferenceElement::entity_offset(int d, int index) const
{
  if (d == 0)
    return index * entity_dofs[0];
  if (d == 1)
    return 3 * entity_dofs[0] + index * entity_dofs[1];
  return 3 * entity_dofs[0] + 3 * entity_dofs[1];
}
//-----------------------------------------------------------------------------
namespace
{

struct FamilyInfo
{
  int degree;
  ValueShape shape;
  MappingKind mapping;
  std::array<int, 3> entity_dofs;
};

FamilyInfo info(Family f)
{
  using M = MappingKind;
  using S = ValueShape;
  switch (f)
  {
  case Family::BDM1:
    return {1, S::vector, M::contravariant_piola, {0, 2, 0}};
  case Family::MTW:
    return {3, S::vector, M::contravariant_piola, {0, 3, 0}};
  case Family::AWc:
    return {3, S::symmetric, M::double_contravariant_piola, {3, 4, 3}};
  case Family::AWnc:
    return {2, S::symmetric, M::double_contravariant_piola, {0, 4, 3}};
  case Family::DG0:
    return {0, S::scalar, M::identity, {0, 0, 1}};
  case Family::DG1:
    return {1, S::vector, M::identity, {0, 0, 6}};
  }
  throw Error("unknown family");
}

// Weights of the normal/tangential or nn/nt component on stored components
Eigen::RowVectorXd trace_weights(ValueShape shape, const Point& n,
                                 const Point& t, bool normal_second)
{
  Eigen::RowVectorXd w(value_size(shape));
  if (shape == ValueShape::vector)
  {
    const Point& d = normal_second ? n : t;
    w << d.x(), d.y();
  }
  else
  {
    const Point& s = normal_second ? n : t;
    // n^T tau s with tau symmetric
    w << n.x() * s.x(), n.x() * s.y() + n.y() * s.x(), n.y() * s.y();
  }
  return w;
}

// l(f) = |e| int_0^1 (w . f) mu_i ds on reference edge k
Functional edge_moment(int k, int i, const Eigen::RowVectorXd& w)
{
  const Triangle ref = reference_triangle();
  const EdgeFrame frame = edge_frames(ref)[k];
  const Point a = ref.vertices[edge_vertices[k][0]];
  const QuadratureRule& rule = quadrature(Domain::interval, 12);
  Functional l;
  l.weights.resize(rule.points.size(), w.size());
  for (std::size_t q = 0; q < rule.points.size(); ++q)
  {
    const double s = rule.points[q].x();
    l.points.push_back(a + s * frame.vector);
    l.weights.row(q)
        = frame.length * rule.weights[q] * shifted_legendre(i, s) * w;
  }
  return l;
}

Functional point_eval(const Point& x, int vs, int c)
{
  Functional l;
  l.points.push_back(x);
  l.weights = Eigen::MatrixXd::Zero(1, vs);
  l.weights(0, c) = 1.0;
  return l;
}

Functional interior_integral(int vs, int c)
{
  const QuadratureRule& rule = quadrature(Domain::triangle, 4);
  Functional l;
  l.points = rule.points;
  l.weights = Eigen::MatrixXd::Zero(rule.points.size(), vs);
  for (std::size_t q = 0; q < rule.points.size(); ++q)
    l.weights(q, c) = rule.weights[q];
  return l;
}

// Null space of the rows of G, orthonormal, as rows
Eigen::MatrixXd null_space(const Eigen::MatrixXd& G, int expected)
{
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double tol = 1e-8 * (sv.size() > 0 ? sv(0) : 1.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol)
      ++rank;
  const int n = static_cast<int>(G.cols());
  if (n - rank != expected)
    throw RankDeficiency("constrained space has dimension "
                         + std::to_string(n - rank) + ", expected "
                         + std::to_string(expected));
  return svd.matrixV().rightCols(n - rank).transpose();
}

} // namespace
//-----------------------------------------------------------------------------
Eigen::MatrixXd constrained_space(Family family)
{
  const FamilyInfo fi = info(family);
  const PolynomialBasis emb{fi.degree, fi.shape};
  const int n = emb.dim();
  const int nd = emb.scalar_dim();
  const Triangle ref = reference_triangle();
  const auto frames = edge_frames(ref);

  if (family == Family::BDM1 || family == Family::DG0 || family == Family::DG1)
    return Eigen::MatrixXd::Identity(n, n);

  std::vector<Functional> edge_constraints;
  if (family == Family::MTW)
  {
    for (int k = 0; k < 3; ++k)
      for (int i : {2, 3})
        edge_constraints.push_back(edge_moment(
            k, i, trace_weights(fi.shape, frames[k].normal, frames[k].tangent, true)));
  }
  else if (family == Family::AWnc)
  {
    for (int k = 0; k < 3; ++k)
      edge_constraints.push_back(edge_moment(
          k, 2, trace_weights(fi.shape, frames[k].normal, frames[k].tangent, true)));
  }
  Eigen::MatrixXd G = dual_matrix(edge_constraints, emb);

  // divergence moments against orthonormal scalar polynomials
  std::vector<std::pair<int, int>> div_rows; // (row component, phi index)
  if (family == Family::MTW)
    for (int j = 1; j < polyset_dim(2); ++j)
      div_rows.emplace_back(0, j);
  else if (family == Family::AWc)
    for (int c = 0; c < 2; ++c)
      for (int j = polyset_dim(1); j < polyset_dim(2); ++j)
        div_rows.emplace_back(c, j);

  if (!div_rows.empty())
  {
    const QuadratureRule& rule = quadrature(Domain::triangle, 2 * fi.degree);
    const Tabulation phi = tabulate_polyset(fi.degree, rule.points, 1);
    Eigen::MatrixXd Gd = Eigen::MatrixXd::Zero(div_rows.size(), n);
    for (std::size_t r = 0; r < div_rows.size(); ++r)
    {
      const auto [row, j] = div_rows[r];
      for (int k = 0; k < n; ++k)
      {
        const int c = k / nd;
        const int m = k % nd;
        double s = 0.0;
        for (std::size_t q = 0; q < rule.points.size(); ++q)
        {
          double div = 0.0;
          if (fi.shape == ValueShape::vector)
            div = phi.gradient(m, q, 0, c);
          else
          {
            // (Div tau)_row = d_x tau_{row,0} + d_y tau_{row,1}
            // stored c: 0 -> (0,0), 1 -> (0,1)=(1,0), 2 -> (1,1)
            const int i0 = c == 0 ? 0 : 1;
            const int i1 = c == 2 ? 1 : 0;
            if (i0 == row)
              div += phi.gradient(m, q, 0, i1);
            if (i1 == row && i0 != i1)
              div += phi.gradient(m, q, 0, i0);
          }
          s += rule.weights[q] * div * phi.value(j, q, 0);
        }
        Gd(r, k) = s;
      }
    }
    Eigen::MatrixXd Gall(G.rows() + Gd.rows(), n);
    if (G.rows() > 0)
      Gall << G, Gd;
    else
      Gall = Gd;
    G = Gall;
  }

  const int expected = family == Family::MTW ? 9 : family == Family::AWc ? 24 : 15;
  return null_space(G, expected);
}
//-----------------------------------------------------------------------------
void reference_dofs(Family family, std::vector<DofDescriptor>& dofs,
                    std::vector<Functional>& functionals)
{
  const FamilyInfo fi = info(family);
  const int vs = value_size(fi.shape);
  const Triangle ref = reference_triangle();
  const auto frames = edge_frames(ref);
  dofs.clear();
  functionals.clear();

  auto edge = [&](int k, DofKind kind, int i)
  {
    const bool normal = kind == DofKind::edge_normal_moment
                        || kind == DofKind::edge_nn_moment;
    dofs.push_back({kind, 1, k, i, 0});
    functionals.push_back(edge_moment(
        k, i, trace_weights(fi.shape, frames[k].normal, frames[k].tangent, normal)));
  };

  switch (family)
  {
  case Family::BDM1:
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 2; ++i)
        edge(k, DofKind::edge_normal_moment, i);
    break;
  case Family::MTW:
    for (int k = 0; k < 3; ++k)
    {
      edge(k, DofKind::edge_normal_moment, 0);
      edge(k, DofKind::edge_tangential_moment, 0);
      edge(k, DofKind::edge_normal_moment, 1);
    }
    break;
  case Family::AWc:
  case Family::AWnc:
    if (family == Family::AWc)
      for (int v = 0; v < 3; ++v)
        for (int c = 0; c < 3; ++c)
        {
          dofs.push_back({DofKind::vertex_component, 0, v, 0, c});
          functionals.push_back(point_eval(ref.vertices[v], vs, c));
        }
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 2; ++i)
      {
        edge(k, DofKind::edge_nn_moment, i);
        edge(k, DofKind::edge_nt_moment, i);
      }
    for (int c = 0; c < 3; ++c)
    {
      dofs.push_back({DofKind::interior_moment, 2, 0, 0, c});
      functionals.push_back(interior_integral(vs, c));
    }
    break;
  case Family::DG0:
    dofs.push_back({DofKind::point_value, 2, 0, 0, 0});
    functionals.push_back(point_eval(ref.centroid(), 1, 0));
    break;
  case Family::DG1:
  {
    const std::array<Point, 3> pts
        = {Point(1.0 / 6, 1.0 / 6), Point(2.0 / 3, 1.0 / 6), Point(1.0 / 6, 2.0 / 3)};
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < 3; ++i)
      {
        dofs.push_back({DofKind::point_value, 2, 0, i, c});
        functionals.push_back(point_eval(pts[i], 2, c));
      }
    break;
  }
  }
}
//-----------------------------------------------------------------------------
Eigen::MatrixXd dual_matrix(const std::vector<Functional>& functionals,
                            const PolynomialBasis& embedding)
{
  const int n = embedding.dim();
  Eigen::MatrixXd D(functionals.size(), n);
  for (std::size_t i = 0; i < functionals.size(); ++i)
  {
    const Functional& l = functionals[i];
    const Tabulation t = orthonormal_basis(embedding, l.points, 0);
    for (int k = 0; k < n; ++k)
    {
      double s = 0.0;
      for (std::size_t q = 0; q < l.points.size(); ++q)
        for (int c = 0; c < t.value_size(); ++c)
          s += l.weights(q, c) * t.value(k, q, c);
      D(i, k) = s;
    }
  }
  return D;
}
//-----------------------------------------------------------------------------
ReferenceElement build_reference_element(Family family)
{
  const FamilyInfo fi = info(family);
  ReferenceElement e;
  e.family = family;
  e.degree = fi.degree;
  e.shape = fi.shape;
  e.mapping = fi.mapping;
  e.embedding = PolynomialBasis{fi.degree, fi.shape};
  e.entity_dofs = fi.entity_dofs;
  e.space = constrained_space(family);
  reference_dofs(family, e.dofs, e.functionals);
  if (static_cast<int>(e.dofs.size()) != e.space.rows())
    throw SingularVandermonde("DOF count does not match space dimension");

  const Eigen::MatrixXd Q = dual_matrix(e.functionals, e.embedding)
                            * e.space.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Q);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-12 * sv(0) || sv(0) / sv(sv.size() - 1) > 1e6)
    throw SingularVandermonde("Vandermonde matrix of " + family_name(family)
                              + " is singular");
  const Eigen::MatrixXd theta = Q.inverse();
  e.coefficients = theta.transpose() * e.space;
  return e;
}
//-----------------------------------------------------------------------------
std::shared_ptr<const ReferenceElement> reference_element(Family family)
{
  static std::mutex mutex;
  static std::array<std::shared_ptr<const ReferenceElement>, 6> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[static_cast<int>(family)];
  if (!slot)
    slot = std::make_shared<const ReferenceElement>(build_reference_element(family));
  return slot;
}
//-----------------------------------------------------------------------------
Tabulation tabulate(const ReferenceElement& e, std::span<const Point> points,
                    int nderiv)
{
  const Tabulation phi = tabulate_polyset(e.degree, points, nderiv);
  const int nd = polyset_dim(e.degree);
  const int np = static_cast<int>(points.size());
  const int vs = e.value_size();
  const int nf = e.dim();
  Tabulation t(nf, np, vs, nderiv > 0);

  Eigen::MatrixXd P(nd, np), Px, Py;
  for (int j = 0; j < nd; ++j)
    for (int p = 0; p < np; ++p)
      P(j, p) = phi.value(j, p, 0);
  if (nderiv > 0)
  {
    Px.resize(nd, np);
    Py.resize(nd, np);
    for (int j = 0; j < nd; ++j)
      for (int p = 0; p < np; ++p)
      {
        Px(j, p) = phi.gradient(j, p, 0, 0);
        Py(j, p) = phi.gradient(j, p, 0, 1);
      }
  }
  for (int c = 0; c < vs; ++c)
  {
    const auto C = e.coefficients.middleCols(c * nd, nd);
    const Eigen::MatrixXd V = C * P;
    Eigen::MatrixXd Vx, Vy;
    if (nderiv > 0)
    {
      Vx = C * Px;
      Vy = C * Py;
    }
    for (int f = 0; f < nf; ++f)
      for (int p = 0; p < np; ++p)
      {
        t.value(f, p, c) = V(f, p);
        if (nderiv > 0)
        {
          t.gradient(f, p, c, 0) = Vx(f, p);
          t.gradient(f, p, c, 1) = Vy(f, p);
        }
      }
  }
  return t;
}
//-----------------------------------------------------------------------------

} // namespace piolafe
