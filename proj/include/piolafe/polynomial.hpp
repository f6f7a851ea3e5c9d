#pragma once

#include "piolafe/geometry.hpp"

#include <random>
#include <vector>

namespace piolafe
{

/// Bivariate polynomial in the monomial basis x^a y^b, a + b <= degree.
/// Used for exact symbolic differentiation in identity checks.
class Polynomial
{
public:
  Polynomial() : Polynomial(0) {}
  explicit Polynomial(int degree);

  static Polynomial constant(double c);
  static Polynomial x();
  static Polynomial y();
  /// Coefficients drawn uniformly from [-1, 1].
  static Polynomial random(int degree, std::mt19937_64& rng);

  int degree() const { return _degree; }
  double& coeff(int a, int b) { return _c[index(a, b)]; }
  double coeff(int a, int b) const
  {
    return a + b <= _degree ? _c[index(a, b)] : 0.0;
  }

  double operator()(const Point& p) const;
  Polynomial dx() const;
  Polynomial dy() const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;

  /// q(x) = p(A x + b)
  Polynomial compose_affine(const Mat2& A, const Point& b) const;

private:
  static int index(int a, int b) { return (a + b) * (a + b + 1) / 2 + b; }
  int _degree;
  std::vector<double> _c;
};

} // namespace piolafe
