#include "piolafe/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace piolafe
{

//-----------------------------------------------------------------------------
Polynomial::Polynomial(int degree)
    : _degree(degree), _c((degree + 1) * (degree + 2) / 2, 0.0)
{
}
//-----------------------------------------------------------------------------
Polynomial Polynomial::constant(double c)
{
  Polynomial p(0);
  p.coeff(0, 0) = c;
  return p;
}
//-----------------------------------------------------------------------------
Polynomial Polynomial::x()
{
  Polynomial p(1);
  p.coeff(1, 0) = 1.0;
  return p;
}
//-----------------------------------------------------------------------------
Polynomial Polynomial::y()
{
  Polynomial p(1);
  p.coeff(0, 1) = 1.0;
  return p;
}
//-----------------------------------------------------------------------------
Polynomial Polynomial::random(int degree, std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Polynomial p(degree);
  for (double& c : p._c)
    c = u(rng);
  return p;
}
//-----------------------------------------------------------------------------
double Polynomial::operator()(const Point& p) const
{
  double r = 0.0;
  for (int a = 0; a <= _degree; ++a)
    for (int b = 0; a + b <= _degree; ++b)
      r += coeff(a, b) * std::pow(p.x(), a) * std::pow(p.y(), b);
  return r;
}
//-----------------------------------------------------------------------------
Polynomial Polynomial::dx() const
{
  Polynomial r(std::max(_degree - 1, 0));
  for (int a = 1; a <= _degree; ++a)
    for (int b = 0; a + b <= _degree; ++b)
      r.coeff(a - 1, b) = a * coeff(a, b);
  return r;
}
//-----------------------------------------------------------------------------
Polynomial Polynomial::dy() const
{
  Polynomial r(std::max(_degree - 1, 0));
  for (int a = 0; a <= _degree; ++a)
    for (int b = 1; a + b <= _degree; ++b)
      r.coeff(a, b - 1) = b * coeff(a, b);
  return r;
}
//-----------------------------------------------------------------------------
Polynomial Polynomial::operator+(const Polynomial& o) const
{
  Polynomial r(std::max(_degree, o._degree));
  for (int a = 0; a <= r._degree; ++a)
    for (int b = 0; a + b <= r._degree; ++b)
      r.coeff(a, b) = coeff(a, b) + o.coeff(a, b);
  return r;
}
//-----------------------------------------------------------------------------
Polynomial Polynomial::operator-(const Polynomial& o) const
{
  return *this + o * -1.0;
}
//-----------------------------------------------------------------------------
Polynomial Polynomial::operator*(const Polynomial& o) const
{
  Polynomial r(_degree + o._degree);
  for (int a = 0; a <= _degree; ++a)
    for (int b = 0; a + b <= _degree; ++b)
      for (int c = 0; c <= o._degree; ++c)
        for (int d = 0; c + d <= o._degree; ++d)
          r.coeff(a + c, b + d) += coeff(a, b) * o.coeff(c, d);
  return r;
}
//-----------------------------------------------------------------------------
Polynomial Polynomial::operator*(double s) const
{
  Polynomial r = *this;
  for (double& c : r._c)
    c *= s;
  return r;
}
//-----------------------------------------------------------------------------
Polynomial Polynomial::compose_affine(const Mat2& A, const Point& b) const
{
  Polynomial X = x() * A(0, 0) + y() * A(0, 1) + constant(b.x());
  Polynomial Y = x() * A(1, 0) + y() * A(1, 1) + constant(b.y());
  // powers of the substituted coordinates
  std::vector<Polynomial> Xp{constant(1.0)}, Yp{constant(1.0)};
  for (int k = 1; k <= _degree; ++k)
  {
    Xp.push_back(Xp.back() * X);
    Yp.push_back(Yp.back() * Y);
  }
  Polynomial r(_degree);
  for (int a = 0; a <= _degree; ++a)
    for (int b2 = 0; a + b2 <= _degree; ++b2)
      if (coeff(a, b2) != 0.0)
      {
        const Polynomial t = Xp[a] * Yp[b2] * coeff(a, b2);
        for (int i = 0; i <= _degree; ++i)
          for (int j = 0; i + j <= _degree; ++j)
            r.coeff(i, j) += t.coeff(i, j);
      }
  return r;
}
//-----------------------------------------------------------------------------

} // namespace piolafe
