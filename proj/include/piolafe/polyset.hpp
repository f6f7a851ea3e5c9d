#pragma once

#include "piolafe/geometry.hpp"
#include "piolafe/quadrature.hpp"

#include <span>
#include <vector>

namespace piolafe
{

enum class ValueShape
{
  scalar = 1,
  vector = 2,
  symmetric = 3 ///< components (11, 12, 22)
};

inline int value_size(ValueShape s) { return static_cast<int>(s); }

inline constexpr int max_polyset_degree = 6;

/// Number of scalar polynomials of degree <= n in two variables.
inline int polyset_dim(int n) { return (n + 1) * (n + 2) / 2; }

/// Index of the orthonormal polynomial with "degrees" (p, q).
inline int polyset_index(int p, int q) { return (p + q) * (p + q + 1) / 2 + q; }

/// Values of a family of functions on a set of points.
/// value(f, p, c) and, if requested, gradient(f, p, c, d).
class Tabulation
{
public:
  Tabulation() = default;
  Tabulation(int nfun, int npts, int vs, bool grad)
      : _nf(nfun), _np(npts), _vs(vs), _grad(grad),
        _values(static_cast<std::size_t>(nfun) * npts * vs, 0.0),
        _grads(grad ? _values.size() * 2 : 0, 0.0)
  {
  }

  int num_functions() const { return _nf; }
  int num_points() const { return _np; }
  int value_size() const { return _vs; }
  bool has_gradients() const { return _grad; }

  double& value(int f, int p, int c) { return _values[vidx(f, p, c)]; }
  double value(int f, int p, int c) const { return _values[vidx(f, p, c)]; }
  double& gradient(int f, int p, int c, int d)
  {
    return _grads[2 * vidx(f, p, c) + d];
  }
  double gradient(int f, int p, int c, int d) const
  {
    return _grads[2 * vidx(f, p, c) + d];
  }

  /// Pointer to the vs values of function f at point p.
  const double* values_at(int f, int p) const { return &_values[vidx(f, p, 0)]; }
  /// Pointer to the vs x 2 gradient entries of function f at point p.
  const double* gradients_at(int f, int p) const
  {
    return &_grads[2 * vidx(f, p, 0)];
  }

  std::vector<double>& raw_values() { return _values; }
  std::vector<double>& raw_gradients() { return _grads; }

private:
  std::size_t vidx(int f, int p, int c) const
  {
    return (static_cast<std::size_t>(f) * _np + p) * _vs + c;
  }
  int _nf = 0, _np = 0, _vs = 0;
  bool _grad = false;
  std::vector<double> _values, _grads;
};

/// Orthonormal (Dubiner) scalar polynomials on the reference triangle,
/// hierarchical in degree. Returns a scalar tabulation (vs = 1).
Tabulation tabulate_polyset(int degree, std::span<const Point> points,
                            int nderiv);

/// Orthonormal basis of P_degree with the requested value shape,
/// tensorised as e_c * phi_j with function index c * dim + j, where e_c is
/// the unit in stored component c.
struct PolynomialBasis
{
  int degree;
  ValueShape shape;
  int scalar_dim() const { return polyset_dim(degree); }
  int dim() const { return scalar_dim() * piolafe::value_size(shape); }
};

Tabulation orthonormal_basis(const PolynomialBasis& basis,
                             std::span<const Point> points, int nderiv);

/// Frobenius weight of stored component c of a symmetric tensor.
inline double component_weight(ValueShape s, int c)
{
  return (s == ValueShape::symmetric && c == 1) ? 2.0 : 1.0;
}

/// Shifted Legendre polynomial on [0,1].
double shifted_legendre(int i, double s);

struct EdgeMomentBasis
{
  int degree;
  std::vector<double> points;
  std::vector<double> weights;
  /// values(i, q) = mu_i(points[q])
  Eigen::MatrixXd values;
};

/// mu_0 ... mu_degree on an interval rule exact for degree-6 products.
EdgeMomentBasis edge_moment_basis(int degree);

} // namespace piolafe
