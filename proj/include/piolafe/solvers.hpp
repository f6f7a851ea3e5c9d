#pragma once

#include "piolafe/assembly.hpp"
#include "piolafe/space.hpp"

#include <Eigen/Sparse>
#include <functional>
#include <memory>
#include <vector>

namespace piolafe
{

/// Sparse LU with a residual check (normwise backward error <= 1e-10 after at
/// most two steps of iterative refinement). Throws SingularSystem.
Eigen::VectorXd direct_solve(const SparseMatrix& A, const Eigen::VectorXd& b);

/// Name of the sparse LU backend in use.
const char* direct_solver_name();

/// y = Op x
class LinearOperator
{
public:
  virtual ~LinearOperator() = default;
  virtual int size() const = 0;
  virtual void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const = 0;
};

class MatrixOperator : public LinearOperator
{
public:
  explicit MatrixOperator(SparseMatrix A) : _A(std::move(A)) {}
  int size() const override { return static_cast<int>(_A.rows()); }
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override { y = _A * x; }

private:
  SparseMatrix _A;
};

struct FgmresConfig
{
  /// converged when ||r|| <= max(rtol ||b||, atol)
  double rtol = 1e-5;
  double atol = 0.0;
  int max_iterations = 1000;
  int restart = 100;
};

struct SolveResult
{
  Eigen::VectorXd x;
  int iterations = 0;
  std::vector<double> residual_history;
  bool converged = false;
};

/// Flexible GMRES with right preconditioning. M may be null.
SolveResult fgmres(const LinearOperator& A, const Eigen::VectorXd& b,
                   const LinearOperator* M, const FgmresConfig& config,
                   const Eigen::VectorXd* x0 = nullptr);

SolveResult fgmres(const SparseMatrix& A, const Eigen::VectorXd& b,
                   const LinearOperator* M, const FgmresConfig& config,
                   const Eigen::VectorXd* x0 = nullptr);

/// Per-vertex patch DOF sets, offset into a block system.
struct VertexStarDecomposition
{
  std::vector<std::vector<int>> patches;
  int num_dofs = 0;
};

/// A DOF belongs to patch i iff every cell supporting it contains vertex i.
VertexStarDecomposition vertex_star_decomposition(const GlobalSpace& V, int offset = 0);

/// Additive Schwarz over patches of a matrix, optionally with an additive
/// coarse correction P (A_c)^{-1} P^T, A_c = P^T A P. Duplicate patches
/// are used once.
class AdditiveSchwarz : public LinearOperator
{
public:
  AdditiveSchwarz(const SparseMatrix& A, const VertexStarDecomposition& dec);
  void set_coarse_space(const SparseMatrix& P);
  int size() const override { return _n; }
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override;
  std::size_t num_patches() const { return _patches.size(); }

private:
  struct Patch
  {
    std::vector<int> dofs;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  };
  SparseMatrix _A;
  int _n;
  std::vector<Patch> _patches;
  SparseMatrix _P;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> _coarse_solve;
};

/// Preconditioned Chebyshev sweeps on A x = r with x0 = 0, bounds
/// [0.1, 1.1] lambda_max(M^{-1} A), lambda_max from power iterations.
class Chebyshev : public LinearOperator
{
public:
  /// M must outlive this object.
  Chebyshev(SparseMatrix A, const LinearOperator& M, int sweeps,
            int power_iterations = 10);
  int size() const override { return static_cast<int>(_A.rows()); }
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override;
  double lambda_max() const { return _lmax; }

private:
  SparseMatrix _A;
  const LinearOperator& _M;
  int _sweeps;
  double _lmax;
};

/// Exact inverse of a matrix that is block diagonal over cells of a space.
class CellBlockInverse : public LinearOperator
{
public:
  CellBlockInverse(const SparseMatrix& M, const GlobalSpace& U);
  int size() const override { return _n; }
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override;

private:
  int _n;
  std::vector<std::vector<int>> _dofs;
  std::vector<Eigen::MatrixXd> _inv;
};

/// Upper block-triangular preconditioner for [[A, B^T], [B, 0]] with
/// S^{-1} = -alpha M_u^{-1}:
///   y_u = -alpha M_u^{-1} r_u,  y_s = A~^{-1} (r_s - B^T y_u).
class BlockALPreconditioner : public LinearOperator
{
public:
  /// inner: approximate inverse of the primary block. Both operators
  /// must outlive this object.
  BlockALPreconditioner(const LinearSystem& sys, const LinearOperator& inner,
                        const LinearOperator& mass_inverse, double alpha);
  int size() const override { return _n0 + _n1; }
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override;

private:
  int _n0, _n1;
  SparseMatrix _Bt;
  const LinearOperator& _inner;
  const LinearOperator& _minv;
  double _alpha;
};

/// Primary diagonal block of a block system.
SparseMatrix primary_block(const LinearSystem& sys);

/// Continuous P1 hat fields interpolated into the space; rows of `fixed`
/// DOFs are zeroed and empty columns dropped.
SparseMatrix p1_prolongation(const GlobalSpace& V, const std::vector<int>& fixed = {});

/// Largest least-squares residual when expressing an orthonormal basis of
/// the kernel of the divergence V -> Q as sums of divergence-free fields
/// supported in single vertex stars.
double kernel_capture_residual(const GlobalSpace& V, const GlobalSpace& Q);

/// Extreme eigenvalues of an SPD matrix by power and inverse iteration.
std::pair<double, double> extreme_eigenvalues(const SparseMatrix& A,
                                              int iterations = 300);

} // namespace piolafe
