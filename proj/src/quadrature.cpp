#include "piolafe/quadrature.hpp"
#include "piolafe/errors.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace piolafe
{

//-----------------------------------------------------------------------------
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w)
{
  // Legendre P_m and its derivative at z
  auto legendre = [m](double z, double& dp)
  {
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= m; ++k)
    {
      const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = m * (z * p1 - p0) / (z * z - 1.0);
    return p1;
  };

  x.resize(m);
  w.resize(m);
  for (int i = 0; i < m; ++i)
  {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it)
    {
      const double dz = legendre(z, dp) / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15)
        break;
    }
    legendre(z, dp);
    x[m - 1 - i] = 0.5 * (z + 1.0);
    w[m - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
}
//-----------------------------------------------------------------------------
namespace
{
QuadratureRule make_rule(Domain domain, int degree)
{
  QuadratureRule rule;
  rule.domain = domain;
  rule.degree = degree;
  std::vector<double> x, w;
  if (domain == Domain::interval)
  {
    gauss_legendre(degree / 2 + 1, x, w);
    for (std::size_t i = 0; i < x.size(); ++i)
    {
      rule.points.emplace_back(x[i], 0.0);
      rule.weights.push_back(w[i]);
    }
    return rule;
  }

  // Duffy: (u, v) -> (u, (1 - u) v), Jacobian (1 - u)
  gauss_legendre((degree + 3) / 2, x, w);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j)
    {
      rule.points.emplace_back(x[i], (1.0 - x[i]) * x[j]);
      rule.weights.push_back(w[i] * w[j] * (1.0 - x[i]));
    }
  return rule;
}

struct RuleTable
{
  std::array<QuadratureRule, max_quadrature_degree + 1> interval;
  std::array<QuadratureRule, max_quadrature_degree + 1> triangle;
  RuleTable()
  {
    for (int d = 0; d <= max_quadrature_degree; ++d)
    {
      interval[d] = make_rule(Domain::interval, d);
      triangle[d] = make_rule(Domain::triangle, d);
    }
  }
};
} // namespace
//-----------------------------------------------------------------------------
const QuadratureRule& quadrature(Domain domain, int degree)
{
  if (degree < 0 || degree > max_quadrature_degree)
    throw UnsupportedDegree("quadrature degree " + std::to_string(degree));
  static const RuleTable table;
  return domain == Domain::interval ? table.interval[degree]
                                    : table.triangle[degree];
}
//-----------------------------------------------------------------------------

} // namespace piolafe
