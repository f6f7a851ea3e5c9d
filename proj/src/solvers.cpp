#include "piolafe/solvers.hpp"
#include "piolafe/errors.hpp"
#include "piolafe/quadrature.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#ifdef PIOLAFE_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

namespace piolafe
{

//-----------------------------------------------------------------------------
const char* direct_solver_name()
{
#ifdef PIOLAFE_HAVE_UMFPACK
  return "umfpack";
#else
  return "eigen-sparselu";
#endif
}
//-----------------------------------------------------------------------------
Eigen::VectorXd direct_solve(const SparseMatrix& A, const Eigen::VectorXd& b)
{
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw SingularSystem("direct_solve: dimension mismatch");
  SparseMatrix Ac = A;
  Ac.makeCompressed();
#ifdef PIOLAFE_HAVE_UMFPACK
  Eigen::UmfPackLU<SparseMatrix> lu;
#else
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
#endif
  lu.compute(Ac);
  if (lu.info() != Eigen::Success)
    throw SingularSystem("sparse LU factorisation failed");
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite())
    throw SingularSystem("sparse LU solve failed");
  // normwise backward error in the infinity norm
  double anorm = 0.0;
  {
    Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(Ac.rows());
    for (int k = 0; k < Ac.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(Ac, k); it; ++it)
        rowsum[it.row()] += std::abs(it.value());
    anorm = rowsum.maxCoeff();
  }
  auto backward_error = [&](const Eigen::VectorXd& y)
  {
    const double d = anorm * y.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>();
    return d > 0 ? (b - Ac * y).lpNorm<Eigen::Infinity>() / d : 0.0;
  };
  for (int it = 0; it < 2 && backward_error(x) > 1e-14; ++it)
    x += lu.solve(Eigen::VectorXd(b - Ac * x));
  const double err = backward_error(x);
  if (!(err <= 1e-10))
  {
    char buf[96];
    std::snprintf(buf, sizeof buf, "direct solve backward error %.3e exceeds 1e-10", err);
    throw SingularSystem(buf);
  }
  return x;
}
//-----------------------------------------------------------------------------
SolveResult fgmres(const SparseMatrix& A, const Eigen::VectorXd& b,
                   const LinearOperator* M, const FgmresConfig& config,
                   const Eigen::VectorXd* x0)
{
  return fgmres(MatrixOperator(A), b, M, config, x0);
}
//-----------------------------------------------------------------------------
SolveResult fgmres(const LinearOperator& A, const Eigen::VectorXd& b,
                   const LinearOperator* M, const FgmresConfig& cfg,
                   const Eigen::VectorXd* x0)
{
  const int n = static_cast<int>(b.size());
  const int m = std::max(1, cfg.restart);
  SolveResult res;
  res.x = x0 ? *x0 : Eigen::VectorXd::Zero(n);
  const double target = std::max(cfg.rtol * b.norm(), cfg.atol);

  Eigen::VectorXd r(n), w(n), tmp(n);
  A.apply(res.x, tmp);
  r = b - tmp;
  double beta = r.norm();
  res.residual_history.push_back(beta);
  if (beta <= target)
  {
    res.converged = true;
    return res;
  }

  Eigen::MatrixXd V(n, m + 1), Z(n, m);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
  Eigen::VectorXd cs(m), sn(m), g(m + 1);

  while (res.iterations < cfg.max_iterations)
  {
    V.col(0) = r / beta;
    g.setZero();
    g[0] = beta;
    H.setZero();
    int j = 0;
    for (; j < m && res.iterations < cfg.max_iterations; ++j)
    {
      if (M)
      {
        Eigen::VectorXd z(n);
        M->apply(V.col(j), z);
        Z.col(j) = z;
      }
      else
        Z.col(j) = V.col(j);
      A.apply(Z.col(j), w);
      // modified Gram-Schmidt, twice for stability
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= j; ++i)
        {
          const double h = V.col(i).dot(w);
          H(i, j) += h;
          w -= h * V.col(i);
        }
      H(j + 1, j) = w.norm();
      if (H(j + 1, j) > 0.0)
        V.col(j + 1) = w / H(j + 1, j);
      for (int i = 0; i < j; ++i)
      {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double d = std::hypot(H(j, j), H(j + 1, j));
      cs[j] = d > 0 ? H(j, j) / d : 1.0;
      sn[j] = d > 0 ? H(j + 1, j) / d : 0.0;
      H(j, j) = d;
      H(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      ++res.iterations;
      res.residual_history.push_back(std::abs(g[j + 1]));
      if (std::abs(g[j + 1]) <= target || H(j, j) == 0.0)
      {
        ++j;
        break;
      }
    }
    // solve the upper triangular least squares system
    Eigen::VectorXd y = H.topLeftCorner(j, j)
                            .triangularView<Eigen::Upper>()
                            .solve(g.head(j));
    res.x += Z.leftCols(j) * y;
    A.apply(res.x, tmp);
    r = b - tmp;
    beta = r.norm();
    if (beta <= target)
    {
      res.converged = true;
      break;
    }
  }
  return res;
}
//-----------------------------------------------------------------------------
VertexStarDecomposition vertex_star_decomposition(const GlobalSpace& V, int offset)
{
  const Mesh& m = V.mesh();
  // cells supporting each DOF
  std::vector<std::vector<int>> support(V.num_dofs());
  for (int c = 0; c < m.num_cells(); ++c)
    for (int d : V.cell_dofs(c))
      support[d].push_back(c);
  VertexStarDecomposition dec;
  dec.patches.resize(m.num_vertices());
  dec.num_dofs = V.num_dofs();
  for (int d = 0; d < V.num_dofs(); ++d)
  {
    std::array<int, 3> common = m.cells()[support[d][0]];
    int nc = 3;
    for (std::size_t s = 1; s < support[d].size(); ++s)
    {
      const auto& cv = m.cells()[support[d][s]];
      int k = 0;
      for (int i = 0; i < nc; ++i)
        if (std::find(cv.begin(), cv.end(), common[i]) != cv.end())
          common[k++] = common[i];
      nc = k;
    }
    for (int i = 0; i < nc; ++i)
      dec.patches[common[i]].push_back(offset + d);
  }
  return dec;
}
//-----------------------------------------------------------------------------
AdditiveSchwarz::AdditiveSchwarz(const SparseMatrix& A,
                                 const VertexStarDecomposition& dec)
    : _A(A), _n(static_cast<int>(A.rows()))
{
  std::vector<int> local(_n, -1);
  // identical patches span the same subspace; keep one copy
  std::set<std::vector<int>> seen;
  for (const auto& pd : dec.patches)
  {
    if (pd.empty() || !seen.insert(pd).second)
      continue;
    Patch p;
    p.dofs = pd;
    const int k = static_cast<int>(pd.size());
    for (int i = 0; i < k; ++i)
      local[pd[i]] = i;
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(k, k);
    for (int j = 0; j < k; ++j)
      for (SparseMatrix::InnerIterator it(_A, pd[j]); it; ++it)
        if (local[it.row()] >= 0)
          D(local[it.row()], j) = it.value();
    for (int i = 0; i < k; ++i)
      local[pd[i]] = -1;
    p.lu.compute(D);
    if (!(p.lu.rcond() > 1e-14))
      throw SingularPatch("singular vertex patch of size " + std::to_string(k));
    _patches.push_back(std::move(p));
  }
}
//-----------------------------------------------------------------------------
void AdditiveSchwarz::set_coarse_space(const SparseMatrix& P)
{
  _P = P;
  SparseMatrix Ac = (SparseMatrix(P.transpose()) * _A * P).pruned();
  auto lu = std::make_shared<Eigen::SparseLU<SparseMatrix>>();
  Ac.makeCompressed();
  lu->compute(Ac);
  if (lu->info() != Eigen::Success)
    throw SingularPatch("singular coarse operator");
  _coarse_solve = [lu](const Eigen::VectorXd& r) { return Eigen::VectorXd(lu->solve(r)); };
}
//-----------------------------------------------------------------------------
void AdditiveSchwarz::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const
{
  y = Eigen::VectorXd::Zero(_n);
  Eigen::VectorXd r, z;
  for (const Patch& p : _patches)
  {
    const int k = static_cast<int>(p.dofs.size());
    r.resize(k);
    for (int i = 0; i < k; ++i)
      r[i] = x[p.dofs[i]];
    z = p.lu.solve(r);
    for (int i = 0; i < k; ++i)
      y[p.dofs[i]] += z[i];
  }
  if (_coarse_solve)
    y += _P * _coarse_solve(_P.transpose() * x);
}
//-----------------------------------------------------------------------------
Chebyshev::Chebyshev(SparseMatrix A, const LinearOperator& M, int sweeps,
                     int power_iterations)
    : _A(std::move(A)), _M(M), _sweeps(std::max(1, sweeps))
{
  const int n = static_cast<int>(_A.rows());
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n), w(n), t(n);
  for (int i = 0; i < n; ++i)
    v[i] = u(rng);
  v.normalize();
  _lmax = 1.0;
  for (int it = 0; it < power_iterations; ++it)
  {
    t = _A * v;
    _M.apply(t, w);
    _lmax = w.norm();
    if (_lmax == 0.0)
    {
      _lmax = 1.0;
      break;
    }
    v = w / _lmax;
  }
}
//-----------------------------------------------------------------------------
void Chebyshev::apply(const Eigen::VectorXd& rhs, Eigen::VectorXd& x) const
{
  const double a = 0.1 * _lmax, b = 1.1 * _lmax;
  const double theta = 0.5 * (b + a), delta = 0.5 * (b - a);
  const double sigma = theta / delta;
  double rho = 1.0 / sigma;
  Eigen::VectorXd r = rhs, z, d;
  _M.apply(r, z);
  d = z / theta;
  x = d;
  for (int k = 1; k < _sweeps; ++k)
  {
    r -= _A * d;
    _M.apply(r, z);
    const double rho1 = 1.0 / (2.0 * sigma - rho);
    d = rho1 * rho * d + (2.0 * rho1 / delta) * z;
    x += d;
    rho = rho1;
  }
}
//-----------------------------------------------------------------------------
CellBlockInverse::CellBlockInverse(const SparseMatrix& M, const GlobalSpace& U)
    : _n(static_cast<int>(M.rows()))
{
  for (int c = 0; c < U.mesh().num_cells(); ++c)
  {
    const auto d = U.cell_dofs(c);
    const int k = static_cast<int>(d.size());
    Eigen::MatrixXd B(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        B(i, j) = M.coeff(d[i], d[j]);
    _dofs.emplace_back(d.begin(), d.end());
    _inv.push_back(B.inverse());
  }
}
//-----------------------------------------------------------------------------
void CellBlockInverse::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const
{
  y = Eigen::VectorXd::Zero(_n);
  for (std::size_t c = 0; c < _dofs.size(); ++c)
  {
    const auto& d = _dofs[c];
    Eigen::VectorXd r(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
      r[i] = x[d[i]];
    const Eigen::VectorXd z = _inv[c] * r;
    for (std::size_t i = 0; i < d.size(); ++i)
      y[d[i]] = z[i];
  }
}
//-----------------------------------------------------------------------------
SparseMatrix primary_block(const LinearSystem& sys)
{
  return sys.matrix.topLeftCorner(sys.primary_size, sys.primary_size);
}
//-----------------------------------------------------------------------------
BlockALPreconditioner::BlockALPreconditioner(const LinearSystem& sys,
                                             const LinearOperator& inner,
                                             const LinearOperator& mass_inverse,
                                             double alpha)
    : _n0(sys.primary_size), _n1(sys.secondary_size),
      _Bt(sys.matrix.topRightCorner(sys.primary_size, sys.secondary_size)),
      _inner(inner), _minv(mass_inverse), _alpha(alpha)
{
  if (!(alpha > 0.0))
    throw Error("block preconditioner needs alpha > 0");
}
//-----------------------------------------------------------------------------
void BlockALPreconditioner::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const
{
  y.resize(_n0 + _n1);
  Eigen::VectorXd yu, ys;
  _minv.apply(x.tail(_n1), yu);
  yu *= -_alpha;
  const Eigen::VectorXd t = x.head(_n0) - _Bt * yu;
  _inner.apply(t, ys);
  y.head(_n0) = ys;
  y.tail(_n1) = yu;
}
//-----------------------------------------------------------------------------
SparseMatrix p1_prolongation(const GlobalSpace& V, const std::vector<int>& fixed)
{
  SparseMatrix P = p1_interpolation(V);
  if (fixed.empty())
    return P;
  std::vector<char> isfixed(V.num_dofs(), 0);
  for (int d : fixed)
    isfixed[d] = 1;
  P.prune([&](int row, int, double) { return !isfixed[row]; });
  // drop coarse columns left empty
  std::vector<int> keep;
  for (int k = 0; k < P.outerSize(); ++k)
    if (P.col(k).nonZeros() > 0)
      keep.push_back(k);
  SparseMatrix S(P.cols(), keep.size());
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t j = 0; j < keep.size(); ++j)
    t.emplace_back(keep[j], static_cast<int>(j), 1.0);
  S.setFromTriplets(t.begin(), t.end());
  return P * S;
}
//-----------------------------------------------------------------------------
namespace
{
Eigen::MatrixXd dense_null_space(const Eigen::MatrixXd& B)
{
  Eigen::BDCSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = 1e-10 * (sv.size() ? sv(0) : 1.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol)
      ++rank;
  return svd.matrixV().rightCols(B.cols() - rank);
}
} // namespace
//-----------------------------------------------------------------------------
double kernel_capture_residual(const GlobalSpace& V, const GlobalSpace& Q)
{
  const Eigen::MatrixXd B = Eigen::MatrixXd(assemble_divergence(V, Q));
  const Eigen::MatrixXd N = dense_null_space(B);
  const VertexStarDecomposition dec = vertex_star_decomposition(V);
  std::vector<Eigen::VectorXd> cols;
  for (const auto& p : dec.patches)
  {
    if (p.empty())
      continue;
    Eigen::MatrixXd Bp(B.rows(), p.size());
    for (std::size_t j = 0; j < p.size(); ++j)
      Bp.col(j) = B.col(p[j]);
    const Eigen::MatrixXd Zp = dense_null_space(Bp);
    for (int k = 0; k < Zp.cols(); ++k)
    {
      Eigen::VectorXd z = Eigen::VectorXd::Zero(V.num_dofs());
      for (std::size_t j = 0; j < p.size(); ++j)
        z[p[j]] = Zp(j, k);
      cols.push_back(z);
    }
  }
  if (N.cols() == 0)
    return 0.0;
  Eigen::MatrixXd Z(V.num_dofs(), cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k)
    Z.col(k) = cols[k];
  // least squares Z c = n for every kernel basis vector
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Z);
  const Eigen::MatrixXd C = cod.solve(N);
  return (Z * C - N).colwise().norm().maxCoeff();
}
//-----------------------------------------------------------------------------
std::pair<double, double> extreme_eigenvalues(const SparseMatrix& A, int iterations)
{
  const int n = static_cast<int>(A.rows());
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i)
    v[i] = u(rng);
  v.normalize();
  Eigen::VectorXd w0 = v;

  double lmax = 0.0;
  for (int it = 0; it < iterations; ++it)
  {
    Eigen::VectorXd w = A * v;
    lmax = v.dot(w);
    v = w.normalized();
  }
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw SingularSystem("LDLT factorisation failed");
  v = w0;
  double lmin = 0.0;
  for (int it = 0; it < iterations; ++it)
  {
    Eigen::VectorXd w = ldlt.solve(v);
    lmin = 1.0 / v.dot(w);
    v = w.normalized();
  }
  return {lmin, lmax};
}
//-----------------------------------------------------------------------------

} // namespace piolafe
