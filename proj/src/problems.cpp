#include "piolafe/problems.hpp"
#include "piolafe/errors.hpp"
#include "piolafe/mesh.hpp"

#include <cmath>
#include <numbers>

namespace piolafe
{

namespace
{
constexpr double pi = std::numbers::pi;
}

//-----------------------------------------------------------------------------
ElasticityParameters ElasticityParameters::from_young(double E, double nu,
                                                      bool plane_stress)
{
  return {E / (2.0 * (1.0 + nu)), nu, plane_stress};
}
//-----------------------------------------------------------------------------
double ElasticityParameters::lambda() const
{
  const double l = 2.0 * mu * nu / (1.0 - 2.0 * nu);
  return plane_stress ? 2.0 * mu * l / (l + 2.0 * mu) : l;
}
//-----------------------------------------------------------------------------
Mat2 ElasticityParameters::stiffness(const Mat2& eps) const
{
  return 2.0 * mu * eps + lambda() * eps.trace() * Mat2::Identity();
}
//-----------------------------------------------------------------------------
Mat2 ElasticityParameters::compliance(const Mat2& tau) const
{
  const double l = lambda();
  return (tau - l / (2.0 * mu + 2.0 * l) * tau.trace() * Mat2::Identity())
         / (2.0 * mu);
}
//-----------------------------------------------------------------------------
ProblemSpec mtw_manufactured(double eps)
{
  ProblemSpec s;
  s.kind = ProblemKind::mtw_stokes_darcy;
  s.name = "mtw";
  s.eps = eps;
  s.dirichlet_tags = {BoundaryTag::left, BoundaryTag::right, BoundaryTag::bottom};
  s.neumann_tags = {BoundaryTag::top};
  const double ln2 = std::log(2.0);
  s.u = [](const Point& x) { return Point(std::pow(2.0, 1.0 - x.y()), 0.0); };
  s.p = [](const Point& x) { return std::cos(pi * x.x()) * std::cos(2 * pi * x.y()); };
  s.j = s.u;
  // f = u - eps^2 lap u + grad p
  s.f = [eps, ln2](const Point& x)
  {
    const double w = std::pow(2.0, 1.0 - x.y());
    const double px = -pi * std::sin(pi * x.x()) * std::cos(2 * pi * x.y());
    const double py = -2 * pi * std::cos(pi * x.x()) * std::sin(2 * pi * x.y());
    return Point(w - eps * eps * ln2 * ln2 * w + px, py);
  };
  s.g = [](const Point&) { return 0.0; };
  // K = eps^2 grad u - p I
  s.K = [eps, ln2, p = s.p](const Point& x)
  {
    Mat2 K;
    K << -p(x), -eps * eps * ln2 * std::pow(2.0, 1.0 - x.y()), 0.0, -p(x);
    return K;
  };
  return s;
}
//-----------------------------------------------------------------------------
ProblemSpec beam_problem(double nu, double mu)
{
  ProblemSpec s;
  s.kind = ProblemKind::mtw_primal_elasticity;
  s.name = "beam";
  s.elasticity = {mu, nu, true};
  s.dirichlet_tags = {BoundaryTag::left};
  s.neumann_tags = {BoundaryTag::right, BoundaryTag::bottom, BoundaryTag::top};
  s.f = [](const Point&) { return Point(0.0, -1e-3); };
  s.j = [](const Point&) { return Point(0.0, 0.0); };
  return s;
}
//-----------------------------------------------------------------------------
ProblemSpec hr_manufactured(Family family, double nu, double mu)
{
  ProblemSpec s;
  s.kind = ProblemKind::hr_displacement;
  s.elasticity = {mu, nu, false};
  s.dirichlet_tags = {BoundaryTag::left, BoundaryTag::right, BoundaryTag::bottom,
                      BoundaryTag::top};
  const ElasticityParameters ep = s.elasticity;

  if (family == Family::AWnc)
  {
    s.name = "awnc";
    s.u = [](const Point& x)
    {
      const double w = std::sin(pi * x.x()) * std::sin(pi * x.y());
      return Point(w, w);
    };
    s.sigma = [](const Point& x)
    {
      Mat2 t;
      const double o = x.y() + 2 * std::cos(pi * x.x() / 2);
      t << std::cos(pi * x.x()) * std::cos(3 * pi * x.y()), o, o,
          -std::sin(3 * pi * x.x()) * std::cos(2 * pi * x.x());
      return t;
    };
    s.f = [](const Point& x)
    {
      return Point(-pi * std::sin(pi * x.x()) * std::cos(3 * pi * x.y()) + 1.0,
                   -pi * std::sin(pi * x.x() / 2));
    };
    // the fields are independent, so A sigma - eps(u) enters as a source
    s.residual = [ep, sig = s.sigma](const Point& x)
    {
      const double sx = pi * std::cos(pi * x.x()) * std::sin(pi * x.y());
      const double sy = pi * std::sin(pi * x.x()) * std::cos(pi * x.y());
      Mat2 e;
      e << sx, 0.5 * (sx + sy), 0.5 * (sx + sy), sy;
      return Mat2(ep.compliance(sig(x)) - e);
    };
  }
  else if (family == Family::AWc)
  {
    s.name = "awc";
    s.u = [](const Point& x)
    {
      return Point(-std::exp(std::sin(pi * x.y() / 2)), 3 * std::cos(pi * x.x()));
    };
    // div u = 0, so sigma = 2 mu eps(u)
    s.sigma = [mu](const Point& x)
    {
      const double g = std::sin(pi * x.y() / 2);
      const double u1y = -std::exp(g) * (pi / 2) * std::cos(pi * x.y() / 2);
      const double u2x = -3 * pi * std::sin(pi * x.x());
      Mat2 t;
      t << 0.0, mu * (u1y + u2x), mu * (u1y + u2x), 0.0;
      return t;
    };
    s.f = [mu](const Point& x)
    {
      const double g = std::sin(pi * x.y() / 2);
      const double g1 = (pi / 2) * std::cos(pi * x.y() / 2);
      const double g2 = -(pi / 2) * (pi / 2) * g;
      const double u1yy = -std::exp(g) * (g1 * g1 + g2);
      const double u2xx = -3 * pi * pi * std::cos(pi * x.x());
      return Point(mu * u1yy, mu * u2xx);
    };
  }
  else
    throw Error("manufactured Hellinger-Reissner solution needs awc or awnc");
  s.u0 = s.u;
  return s;
}
//-----------------------------------------------------------------------------
ProblemSpec traction_problem(double gamma, double alpha)
{
  ProblemSpec s;
  s.kind = ProblemKind::hr_nitsche;
  s.name = "traction";
  s.elasticity = ElasticityParameters::from_young(10.0, 0.2);
  s.gamma = gamma;
  s.alpha = alpha;
  s.dirichlet_tags = {BoundaryTag::left, BoundaryTag::right};
  s.neumann_tags = {BoundaryTag::bottom, BoundaryTag::top};
  s.f = [](const Point&) { return Point(0.0, 0.0); };
  s.u0 = [](const Point& x) { return x.x() > 0.5 ? Point(-1.0, 0.0) : Point(0.0, 0.0); };
  s.traction = [](const Point&) { return Point(0.0, 0.0); };
  return s;
}
//-----------------------------------------------------------------------------

} // namespace piolafe
