#pragma once

#include "piolafe/elements.hpp"
#include "piolafe/geometry.hpp"

#include <functional>
#include <string>
#include <vector>

namespace piolafe
{

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Point(const Point&)>;
using TensorField = std::function<Mat2(const Point&)>;

struct ElasticityParameters
{
  double mu = 1.0;
  double nu = 0.25;
  bool plane_stress = false;

  static ElasticityParameters from_young(double E, double nu,
                                         bool plane_stress = false);
  /// Lame parameter 2 mu nu / (1 - 2 nu), or 2 mu lambda / (lambda + 2 mu)
  /// in plane stress.
  double lambda() const;
  /// C eps = 2 mu eps + lambda tr(eps) I
  Mat2 stiffness(const Mat2& eps) const;
  /// A tau = (tau - lambda / (2 mu + 2 lambda) tr(tau) I) / (2 mu)
  Mat2 compliance(const Mat2& tau) const;
};

enum class ProblemKind
{
  mtw_stokes_darcy,
  mtw_primal_elasticity,
  hr_displacement,
  hr_nitsche
};

struct ProblemSpec
{
  ProblemKind kind;
  std::string name;
  double eps = 1.0;
  ElasticityParameters elasticity;
  double gamma = 100.0;
  double alpha = 0.0;
  std::vector<int> dirichlet_tags;
  std::vector<int> neumann_tags;

  // exact solution, empty when unknown
  VectorField u;
  ScalarField p;
  TensorField sigma;

  // data
  VectorField f;
  ScalarField g;          ///< divergence data (Stokes-Darcy)
  VectorField j;          ///< essential velocity data
  TensorField K;          ///< flux on the natural boundary (Stokes-Darcy)
  VectorField u0;         ///< boundary displacement (Hellinger-Reissner)
  VectorField traction;   ///< sigma n on the traction boundary
  TensorField residual;   ///< compliance source A sigma - eps(u)

  bool has_exact() const { return static_cast<bool>(u); }
};

/// u = (2^{1-y}, 0), p = cos(pi x) cos(2 pi y) on the unit square,
/// natural boundary y = 1.
ProblemSpec mtw_manufactured(double eps);

/// Cantilever [0,25] x [0,1] clamped on the left, body force (0, -1e-3).
ProblemSpec beam_problem(double nu, double mu = 3.8e4);

/// Pure displacement manufactured solutions for the AW elements.
ProblemSpec hr_manufactured(Family family, double nu, double mu = 1.0);

/// Unit square, u = 0 on the left, u = (-1, 0) on the right, traction free
/// top and bottom, E = 10, nu = 0.2.
ProblemSpec traction_problem(double gamma, double alpha);

} // namespace piolafe
