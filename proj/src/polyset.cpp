#include "piolafe/polyset.hpp"
#include "piolafe/errors.hpp"

#include <cmath>

namespace piolafe
{

//-----------------------------------------------------------------------------
namespace
{
// Jacobi recurrence coefficients for P_{n+1}^{(a,0)}
std::array<double, 3> jrc(int a, int n)
{
  const double an = (a + 2.0 * n + 1) * (a + 2.0 * n + 2)
                    / (2.0 * (n + 1) * (a + n + 1));
  const double bn = double(a) * a * (a + 2.0 * n + 1)
                    / (2.0 * (n + 1) * (a + n + 1) * (a + 2.0 * n));
  const double cn = double(n) * (a + n) * (a + 2.0 * n + 2)
                    / ((n + 1.0) * (a + n + 1) * (a + 2.0 * n));
  return {an, bn, cn};
}
} // namespace
//-----------------------------------------------------------------------------
Tabulation tabulate_polyset(int n, std::span<const Point> points, int nderiv)
{
  if (n < 0 || n > max_polyset_degree)
    throw UnsupportedDegree("polyset degree " + std::to_string(n));
  const int np = static_cast<int>(points.size());
  const int dim = polyset_dim(n);
  const bool grad = nderiv > 0;
  Tabulation tab(dim, np, 1, grad);

  std::vector<double> P(dim), Px(dim), Py(dim);
  for (int ip = 0; ip < np; ++ip)
  {
    const double x = points[ip].x();
    const double y = points[ip].y();
    const double x1 = 2.0 * y - 1.0;
    const double f3 = (1.0 - y) * (1.0 - y);
    const double f3y = -2.0 * (1.0 - y);
    std::fill(P.begin(), P.end(), 0.0);
    std::fill(Px.begin(), Px.end(), 0.0);
    std::fill(Py.begin(), Py.end(), 0.0);
    P[0] = 1.0;

    for (int p = 1; p <= n; ++p)
    {
      const double a = (2.0 * p - 1.0) / p;
      const int i = polyset_index(p, 0);
      const int i1 = polyset_index(p - 1, 0);
      const double lin = 2.0 * x + y - 1.0;
      P[i] = lin * P[i1] * a;
      Px[i] = (2.0 * P[i1] + lin * Px[i1]) * a;
      Py[i] = (P[i1] + lin * Py[i1]) * a;
      if (p > 1)
      {
        const int i2 = polyset_index(p - 2, 0);
        P[i] -= f3 * P[i2] * (a - 1.0);
        Px[i] -= f3 * Px[i2] * (a - 1.0);
        Py[i] -= (f3y * P[i2] + f3 * Py[i2]) * (a - 1.0);
      }
    }

    for (int p = 0; p < n; ++p)
    {
      const int i0 = polyset_index(p, 0);
      const int i1 = polyset_index(p, 1);
      const double c = x1 * (1.5 + p) + 0.5 + p;
      P[i1] = P[i0] * c;
      Px[i1] = Px[i0] * c;
      Py[i1] = Py[i0] * c + P[i0] * 2.0 * (1.5 + p);
      for (int q = 1; q < n - p; ++q)
      {
        const auto [a1, a2, a3] = jrc(2 * p + 1, q);
        const int iq = polyset_index(p, q);
        const int iqp = polyset_index(p, q + 1);
        const int iqm = polyset_index(p, q - 1);
        const double l = x1 * a1 + a2;
        P[iqp] = P[iq] * l - P[iqm] * a3;
        Px[iqp] = Px[iq] * l - Px[iqm] * a3;
        Py[iqp] = Py[iq] * l + P[iq] * 2.0 * a1 - Py[iqm] * a3;
      }
    }

    for (int p = 0; p <= n; ++p)
      for (int q = 0; q <= n - p; ++q)
      {
        const int i = polyset_index(p, q);
        const double s = std::sqrt((p + 0.5) * (p + q + 1)) * 2.0;
        tab.value(i, ip, 0) = P[i] * s;
        if (grad)
        {
          tab.gradient(i, ip, 0, 0) = Px[i] * s;
          tab.gradient(i, ip, 0, 1) = Py[i] * s;
        }
      }
  }
  return tab;
}
//-----------------------------------------------------------------------------
Tabulation orthonormal_basis(const PolynomialBasis& basis,
                             std::span<const Point> points, int nderiv)
{
  const Tabulation s = tabulate_polyset(basis.degree, points, nderiv);
  const int vs = value_size(basis.shape);
  const int nd = basis.scalar_dim();
  const int np = s.num_points();
  Tabulation tab(basis.dim(), np, vs, nderiv > 0);
  for (int c = 0; c < vs; ++c)
    for (int j = 0; j < nd; ++j)
      for (int p = 0; p < np; ++p)
      {
        tab.value(c * nd + j, p, c) = s.value(j, p, 0);
        if (nderiv > 0)
          for (int d = 0; d < 2; ++d)
            tab.gradient(c * nd + j, p, c, d) = s.gradient(j, p, 0, d);
      }
  return tab;
}
//-----------------------------------------------------------------------------
double shifted_legendre(int i, double s)
{
  switch (i)
  {
  case 0:
    return 1.0;
  case 1:
    return 2.0 * s - 1.0;
  case 2:
    return 6.0 * s * s - 6.0 * s + 1.0;
  case 3:
    return ((20.0 * s - 30.0) * s + 12.0) * s - 1.0;
  default:
    throw UnsupportedDegree("edge moment degree " + std::to_string(i));
  }
}
//-----------------------------------------------------------------------------
EdgeMomentBasis edge_moment_basis(int degree)
{
  if (degree < 0 || degree > 3)
    throw UnsupportedDegree("edge moment degree " + std::to_string(degree));
  const QuadratureRule& rule = quadrature(Domain::interval, 12);
  EdgeMomentBasis b;
  b.degree = degree;
  for (std::size_t q = 0; q < rule.points.size(); ++q)
  {
    b.points.push_back(rule.points[q].x());
    b.weights.push_back(rule.weights[q]);
  }
  b.values.resize(degree + 1, b.points.size());
  for (int i = 0; i <= degree; ++i)
    for (std::size_t q = 0; q < b.points.size(); ++q)
      b.values(i, q) = shifted_legendre(i, b.points[q]);
  return b;
}
//-----------------------------------------------------------------------------

} // namespace piolafe
