#pragma once

#include "piolafe/problems.hpp"
#include "piolafe/space.hpp"

#include <Eigen/Sparse>
#include <cstdint>
#include <functional>
#include <vector>

namespace piolafe
{

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Operator with block structure [primary; secondary]. Secondary is empty
/// for single-field problems.
struct LinearSystem
{
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  int primary_size = 0;
  int secondary_size = 0;
  std::vector<int> constrained_dofs;
  Eigen::VectorXd constrained_values;

  int size() const { return primary_size + secondary_size; }
};

struct AssemblyOptions
{
  /// worker threads for the cell loop
  int threads = 1;
  /// visit cells in a random order (for order-independence checks)
  bool shuffle = false;
  std::uint64_t seed = 0;
};

/// Quadrature exactness used for forms over elements of this degree.
inline int form_degree(const GlobalSpace& V) { return 2 * V.element().degree + 2; }

/// Point-wise field callback, writes value_size entries.
using FieldFunction = std::function<void(const Point&, double*)>;

FieldFunction vector_field(const VectorField& f);
FieldFunction tensor_field(const TensorField& f);
FieldFunction scalar_field(const ScalarField& f);

/// Apply the (scaled) physical DOFs of the space to a field.
Eigen::VectorXd interpolate(const GlobalSpace& V, const FieldFunction& f);

/// Interpolant of continuous piecewise-linear fields on the same mesh;
/// column value_size * vertex + component.
SparseMatrix p1_interpolation(const GlobalSpace& V);

/// Symmetric elimination: the listed DOFs get identity rows, their
/// columns are moved to the right-hand side.
void apply_essential(LinearSystem& sys, const std::vector<int>& dofs,
                     const Eigen::VectorXd& values);

SparseMatrix assemble_mass(const GlobalSpace& V, const AssemblyOptions& opts = {});

/// B(q, v) = int q div v for a vector space V and a DG0 space Q.
SparseMatrix assemble_divergence(const GlobalSpace& V, const GlobalSpace& Q,
                                 const AssemblyOptions& opts = {});

LinearSystem assemble_mtw_stokes_darcy(const GlobalSpace& V, const GlobalSpace& Q,
                                       const ProblemSpec& spec,
                                       const AssemblyOptions& opts = {});

LinearSystem assemble_mtw_primal_elasticity(const GlobalSpace& V,
                                            const ProblemSpec& spec,
                                            const AssemblyOptions& opts = {});

/// Pure displacement Hellinger-Reissner system, stress space S and vector
/// DG1 displacement space U.
LinearSystem assemble_hr(const GlobalSpace& S, const GlobalSpace& U,
                         const ProblemSpec& spec, const AssemblyOptions& opts = {});

/// Mixed boundary conditions with a Nitsche traction penalty and an
/// augmented Lagrangian term of weight spec.alpha.
LinearSystem assemble_hr_nitsche(const GlobalSpace& S, const GlobalSpace& U,
                                 const ProblemSpec& spec,
                                 const AssemblyOptions& opts = {});

struct ErrorRecord
{
  double u = 0.0;
  double p = 0.0;
  double sigma = 0.0;
  double div_sigma = 0.0;
  double traction = 0.0;
};

/// L2 norm of (discrete field - exact field). An empty exact field means 0.
double l2_error(const GlobalSpace& V, const Eigen::VectorXd& coeffs,
                const FieldFunction& exact, int degree = 10);

/// L2 norm of the broken row-wise divergence of a tensor field minus exact.
double div_error(const GlobalSpace& S, const Eigen::VectorXd& coeffs,
                 const VectorField& exact_div, int degree = 10);

/// || sigma_h n - g ||_{L2(edges with the given tags)}
double traction_residual(const GlobalSpace& S, const Eigen::VectorXd& coeffs,
                         const std::vector<int>& tags, const VectorField& g);

/// Errors of a solution vector [primary; secondary] against spec.
ErrorRecord compute_errors(const Eigen::VectorXd& x, const ProblemSpec& spec,
                           const GlobalSpace& primary, const GlobalSpace* secondary);

/// Outward unit normal of boundary edge e.
Point outward_normal(const Mesh& mesh, int e);

} // namespace piolafe
