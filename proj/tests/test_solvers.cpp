#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "piolafe/errors.hpp"
#include "piolafe/harness.hpp"
#include "piolafe/solvers.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <random>
#include <set>

using namespace piolafe;
using doctest::Approx;

namespace
{
SparseMatrix sparse(const Eigen::MatrixXd& A) { return A.sparseView(); }

SparseMatrix identity(int n)
{
  SparseMatrix I(n, n);
  I.setIdentity();
  return I;
}

class ExactInverse : public LinearOperator
{
public:
  explicit ExactInverse(const SparseMatrix& A) : _n(A.rows()) { _lu.compute(A); }
  int size() const override { return _n; }
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const override
  {
    y = _lu.solve(x);
  }

private:
  int _n;
  Eigen::SparseLU<SparseMatrix> _lu;
};

std::shared_ptr<const Mesh> share(Mesh m) { return std::make_shared<const Mesh>(std::move(m)); }

double relative_residual(const SparseMatrix& A, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& b)
{
  return (b - A * x).norm() / b.norm();
}
} // namespace

TEST_CASE("direct solves")
{
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(5, 1, 5);
  CHECK((direct_solve(identity(5), b) - b).norm() < 1e-15);
  Eigen::MatrixXd S(2, 2);
  S << 1, 1, 1, 0;
  const Eigen::VectorXd x = direct_solve(sparse(S), Eigen::Vector2d(1, 1));
  CHECK(x[0] == Approx(1.0));
  CHECK(std::abs(x[1]) < 1e-15);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::MatrixXd R(50, 50);
  for (int i = 0; i < R.size(); ++i)
    R.data()[i] = g(rng);
  const Eigen::MatrixXd A = R * R.transpose() + 50 * Eigen::MatrixXd::Identity(50, 50);
  const Eigen::VectorXd r = Eigen::VectorXd::Ones(50);
  CHECK(relative_residual(sparse(A), direct_solve(sparse(A), r), r) <= 1e-10);
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(2, 2);
  Z(0, 0) = 1;
  CHECK_THROWS_AS(direct_solve(sparse(Z), Eigen::Vector2d(1, 1)), SingularSystem);
}

TEST_CASE("FGMRES")
{
  FgmresConfig cfg;
  cfg.rtol = 1e-10;
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(8, -1, 2);
  SUBCASE("identity")
  {
    const MatrixOperator I(identity(8));
    const SolveResult r = fgmres(identity(8), b, &I, cfg);
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    CHECK((r.x - b).norm() < 1e-14);
  }
  SUBCASE("exact preconditioner")
  {
    auto m = share(perturb_interior(structured_rectangle(3, 3, Pattern::right), 0.2, 1));
    const auto V = build_global_space(m, Family::MTW);
    const SparseMatrix M = assemble_mass(*V);
    const Eigen::VectorXd rhs = Eigen::VectorXd::Ones(M.rows());
    const ExactInverse P(M);
    const SolveResult r = fgmres(M, rhs, &P, cfg);
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    CHECK(relative_residual(M, r.x, rhs) <= 1e-10);
  }
  SUBCASE("monotone residuals and restarts")
  {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    Eigen::MatrixXd A = 4 * Eigen::MatrixXd::Identity(40, 40);
    for (int i = 0; i < 40; ++i)
      for (int j = 0; j < 40; ++j)
        A(i, j) += 0.3 * u(rng);
    FgmresConfig c = cfg;
    c.restart = 5;
    const Eigen::VectorXd rhs = Eigen::VectorXd::Ones(40);
    const SolveResult r = fgmres(sparse(A), rhs, nullptr, c);
    CHECK(r.converged);
    CHECK(relative_residual(sparse(A), r.x, rhs) <= 1e-9);
    for (std::size_t i = 1; i < r.residual_history.size(); ++i)
      CHECK(r.residual_history[i] <= r.residual_history[i - 1] * (1 + 1e-12));
  }
  SUBCASE("iteration cap")
  {
    FgmresConfig c;
    c.rtol = 1e-14;
    c.max_iterations = 2;
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(10, 10);
    for (int i = 0; i < 10; ++i)
      A(i, i) = i + 1;
    const SolveResult r = fgmres(sparse(A), Eigen::VectorXd::Ones(10), nullptr, c);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 2);
  }
}

TEST_CASE("vertex star patches")
{
  auto m = share(perturb_interior(structured_rectangle(4, 4, Pattern::crossed), 0.2, 3));
  for (Family f : {Family::MTW, Family::AWc, Family::AWnc})
  {
    const auto V = build_global_space(m, f);
    const VertexStarDecomposition dec = vertex_star_decomposition(*V);
    CHECK(dec.num_dofs == V->num_dofs());
    // cells supporting each DOF
    std::vector<std::set<int>> support(V->num_dofs());
    for (int c = 0; c < m->num_cells(); ++c)
      for (int d : V->cell_dofs(c))
        support[d].insert(c);
    std::vector<char> covered(V->num_dofs(), 0);
    REQUIRE(static_cast<int>(dec.patches.size()) == m->num_vertices());
    for (int v = 0; v < m->num_vertices(); ++v)
    {
      const std::set<int> in(dec.patches[v].begin(), dec.patches[v].end());
      for (int d = 0; d < V->num_dofs(); ++d)
      {
        bool all = true;
        for (int c : support[d])
        {
          const auto& cv = m->cells()[c];
          all = all && (cv[0] == v || cv[1] == v || cv[2] == v);
        }
        CHECK(static_cast<bool>(in.count(d)) == all);
      }
      for (int d : dec.patches[v])
        covered[d] = 1;
    }
    for (char c : covered)
      CHECK(c == 1);
  }
}

TEST_CASE("additive Schwarz")
{
  SUBCASE("single cell")
  {
    const std::vector<Point> v{Point(0, 0), Point(1, 0), Point(0.2, 0.9)};
    auto m = share(Mesh(v, {{0, 1, 2}}, [](const Point&) { return 1; }));
    const auto V = build_global_space(m, Family::MTW);
    const SparseMatrix A = assemble_mass(*V);
    const AdditiveSchwarz P(A, vertex_star_decomposition(*V));
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(9, 1, 2);
    Eigen::VectorXd y;
    P.apply(A * x, y);
    CHECK((y - x).norm() < 1e-10 * x.norm());
    P.apply(Eigen::VectorXd::Zero(9), y);
    CHECK(y.norm() == 0.0);
  }
  SUBCASE("preconditioned elasticity beats the plain iteration")
  {
    auto m = share(structured_rectangle(8, 8, Pattern::crossed));
    const auto V = build_global_space(m, Family::MTW);
    ProblemSpec spec = beam_problem(0.3, 1.0);
    const LinearSystem s = assemble_mtw_primal_elasticity(*V, spec);
    FgmresConfig cfg;
    cfg.rtol = 1e-6;
    cfg.max_iterations = 2000;
    const AdditiveSchwarz P(s.matrix, vertex_star_decomposition(*V));
    const SolveResult with = fgmres(s.matrix, s.rhs, &P, cfg);
    const SolveResult without = fgmres(s.matrix, s.rhs, nullptr, cfg);
    CHECK(with.converged);
    CHECK(with.iterations < without.iterations);
    CHECK(relative_residual(s.matrix, with.x, s.rhs) <= 1e-6);
  }
  SUBCASE("coarse correction")
  {
    auto m = share(structured_rectangle(10, 1, Pattern::crossed, 10, 1));
    const auto V = build_global_space(m, Family::MTW);
    const LinearSystem s = assemble_mtw_primal_elasticity(*V, beam_problem(0.3, 1.0));
    FgmresConfig cfg;
    cfg.rtol = 1e-6;
    cfg.max_iterations = 1000;
    AdditiveSchwarz one(s.matrix, vertex_star_decomposition(*V));
    AdditiveSchwarz two(s.matrix, vertex_star_decomposition(*V));
    two.set_coarse_space(p1_prolongation(*V, s.constrained_dofs));
    const SolveResult a = fgmres(s.matrix, s.rhs, &one, cfg);
    const SolveResult b = fgmres(s.matrix, s.rhs, &two, cfg);
    CHECK(b.converged);
    CHECK(b.iterations < a.iterations);
  }
}

TEST_CASE("P1 prolongation")
{
  auto m = share(perturb_interior(structured_rectangle(3, 3, Pattern::right), 0.2, 2));
  const auto V = build_global_space(m, Family::MTW);
  const SparseMatrix P = p1_interpolation(*V);
  CHECK(P.rows() == V->num_dofs());
  CHECK(P.cols() == 2 * m->num_vertices());
  // the sum of all x-hats is the constant (1, 0)
  Eigen::VectorXd e = Eigen::VectorXd::Zero(P.cols());
  for (int v = 0; v < m->num_vertices(); ++v)
    e[2 * v] = 1;
  const Eigen::VectorXd one
      = interpolate(*V, vector_field([](const Point&) { return Point(1, 0); }));
  CHECK((P * e - one).cwiseAbs().maxCoeff() < 1e-12);
  const int tags[] = {left, right, bottom, top};
  const std::vector<int> fixed = V->boundary_dofs(tags);
  const SparseMatrix Pf = p1_prolongation(*V, fixed);
  CHECK(Pf.cols() < P.cols());
  for (int d : fixed)
    CHECK(SparseMatrix(Pf.row(d)).norm() == 0.0);
}

TEST_CASE("Chebyshev smoothing reduces the error")
{
  auto m = share(structured_rectangle(4, 4, Pattern::crossed));
  const auto V = build_global_space(m, Family::MTW);
  const LinearSystem s = assemble_mtw_primal_elasticity(*V, beam_problem(0.3, 1.0));
  const AdditiveSchwarz P(s.matrix, vertex_star_decomposition(*V));
  const Chebyshev C(s.matrix, P, 4);
  CHECK(C.lambda_max() > 0);
  Eigen::VectorXd y;
  C.apply(s.rhs, y);
  const Eigen::VectorXd x = direct_solve(s.matrix, s.rhs);
  Eigen::VectorXd z;
  P.apply(s.rhs, z);
  CHECK((y - x).norm() < (z - x).norm());
}

TEST_CASE("cell block inverse of a DG mass matrix")
{
  auto m = share(perturb_interior(structured_rectangle(3, 3, Pattern::crossed), 0.2, 1));
  for (Family f : {Family::DG0, Family::DG1})
  {
    const auto U = build_global_space(m, f);
    const SparseMatrix M = assemble_mass(*U);
    const CellBlockInverse Mi(M, *U);
    const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(U->num_dofs(), -1, 1);
    Eigen::VectorXd y;
    Mi.apply(M * x, y);
    CHECK((y - x).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("block augmented Lagrangian preconditioner")
{
  auto m = share(perturb_interior(structured_rectangle(4, 4, Pattern::right), 0.2, 1));
  const auto S = build_global_space(m, Family::AWc);
  const auto U = build_global_space(m, Family::DG1);
  std::vector<int> its;
  for (double alpha : {1.0, 10.0, 100.0})
  {
    ProblemSpec spec = hr_manufactured(Family::AWc, 0.25);
    spec.kind = ProblemKind::hr_nitsche;
    spec.alpha = alpha;
    const LinearSystem sys = assemble_hr_nitsche(*S, *U, spec);
    const ExactInverse inner(primary_block(sys));
    const SparseMatrix Mu = assemble_mass(*U);
    const CellBlockInverse Mi(Mu, *U);
    const BlockALPreconditioner P(sys, inner, Mi, alpha);
    FgmresConfig cfg;
    cfg.rtol = 1e-10;
    const SolveResult r = fgmres(sys.matrix, sys.rhs, &P, cfg);
    CHECK(r.converged);
    const Eigen::VectorXd x = direct_solve(sys.matrix, sys.rhs);
    CHECK(relative_residual(sys.matrix, r.x, sys.rhs) <= 1e-10);
    CHECK((r.x - x).norm() <= 1e-5 * x.norm());
    its.push_back(r.iterations);
  }
  CHECK(its[1] <= its[0]);
  CHECK(its[2] <= its[1]);
}

TEST_CASE("kernel capture by vertex stars")
{
  auto m = share(perturb_interior(structured_rectangle(4, 4, Pattern::right), 0.2, 1));
  const auto V = build_global_space(m, Family::MTW);
  const auto Q = build_global_space(m, Family::DG0);
  CHECK(kernel_capture_residual(*V, *Q) <= 1e-8);
}

TEST_CASE("extreme eigenvalues")
{
  Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(30, 1, 30);
  const SparseMatrix D = sparse(d.asDiagonal().toDenseMatrix());
  const auto [lo, hi] = extreme_eigenvalues(D);
  CHECK(lo == Approx(1.0).epsilon(1e-6));
  CHECK(hi == Approx(30.0).epsilon(1e-6));
}

TEST_CASE("beam iteration counts are robust in nu")
{
  const ExperimentReport r = run_beam({0.3, 0.4999999}, BeamOptions{});
  const double a = r.at(0, "iterations"), b = r.at(1, "iterations");
  CHECK(std::abs(a - b) <= 0.2 * std::max(a, b));
  CHECK(r.at(0, "direct_diff") <= 1e-4);
  CHECK(r.at(1, "direct_diff") <= 1e-4);
}
