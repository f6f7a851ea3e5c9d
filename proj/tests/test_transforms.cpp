#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.hpp"
#include "piolafe/transforms.hpp"

#include <cmath>
#include <random>

using namespace piolafe;
using doctest::Approx;

namespace
{
const Mat2 stretch = (Mat2() << 2, 0, 0, 1).finished();

double max_abs(const Eigen::MatrixXd& A) { return A.cwiseAbs().maxCoeff(); }

Triangle stretched() { return Triangle{{Point(0, 0), Point(2, 0), Point(0, 1)}}; }

// random polynomial field of degree 3 with vs components
struct RandomField
{
  int vs;
  Eigen::MatrixXd c; // vs x 10
  RandomField(int vs_, std::mt19937_64& rng) : vs(vs_), c(vs_, 10)
  {
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < c.size(); ++i)
      c.data()[i] = u(rng);
  }
  Eigen::VectorXd operator()(const Point& p) const
  {
    const double x = p.x(), y = p.y();
    Eigen::VectorXd m(10);
    m << 1, x, y, x * x, x * y, y * y, x * x * x, x * x * y, x * y * y, y * y * y;
    return c * m;
  }
};
} // namespace

TEST_CASE("contravariant Piola")
{
  const Point v(0.3, -0.7);
  CHECK((piola_contravariant(Mat2::Identity(), v) - v).norm() < 1e-15);
  const Point w = piola_contravariant(stretch, Point(1, 0));
  CHECK(w.x() == Approx(1.0));
  CHECK(std::abs(w.y()) < 1e-15);
}

TEST_CASE("double contravariant Piola")
{
  const Eigen::Vector3d t(0.5, -0.2, 1.1);
  CHECK((piola_double_contravariant(Mat2::Identity(), t) - t).norm() < 1e-15);
  const Eigen::Vector3d s = piola_double_contravariant(stretch, Eigen::Vector3d(1, 0, 1));
  CHECK(s[0] == Approx(1.0));
  CHECK(std::abs(s[1]) < 1e-15);
  CHECK(s[2] == Approx(0.25));
}

TEST_CASE("moments are preserved by the Piola maps")
{
  std::mt19937_64 rng(17);
  const Triangle ref = reference_triangle();
  for (int trial = 0; trial < 20; ++trial)
  {
    const Triangle tri = oracle::random_triangle(rng);
    const AffineCellMap map = affine_map(tri);
    const RandomField fv(2, rng), ft(3, rng);
    for (int k = 0; k < 3; ++k)
    {
      const Point ra = ref.vertices[edge_vertices[k][0]], rb = ref.vertices[edge_vertices[k][1]];
      const Point pa = tri.vertices[edge_vertices[k][0]], pb = tri.vertices[edge_vertices[k][1]];
      const Point rn = rotate((rb - ra).normalized()), pn = rotate((pb - pa).normalized());
      const auto rr = oracle::segment_rule(ra, rb, 6);
      const auto pr = oracle::segment_rule(pa, pb, 6);
      for (int order = 0; order < 2; ++order)
      {
        double ref_n = 0, phys_n = 0, ref_nn = 0, phys_nn = 0;
        std::vector<double> s, w;
        oracle::interval_rule(6, s, w);
        for (std::size_t q = 0; q < s.size(); ++q)
        {
          const double mu = oracle::legendre01(order, s[q]);
          const Eigen::VectorXd vh = fv(rr.points[q]);
          const Point v = piola_contravariant(map.J, Point(vh[0], vh[1]));
          ref_n += rr.weights[q] * mu * Point(vh[0], vh[1]).dot(rn);
          phys_n += pr.weights[q] * mu * v.dot(pn);
          const Eigen::Vector3d th = ft(rr.points[q]);
          const Eigen::Vector3d t = piola_double_contravariant(map.J, th);
          auto nn = [](const Eigen::Vector3d& x, const Point& n)
          { return x[0] * n.x() * n.x() + 2 * x[1] * n.x() * n.y() + x[2] * n.y() * n.y(); };
          ref_nn += rr.weights[q] * mu * nn(th, rn);
          phys_nn += pr.weights[q] * mu * nn(t, pn);
        }
        CHECK(phys_n == Approx(ref_n).epsilon(1e-12).scale(1.0));
        const double le = (pb - pa).norm(), lr = (rb - ra).norm();
        CHECK(le * phys_nn == Approx(lr * ref_nn).epsilon(1e-12).scale(1.0));
      }
    }
  }
}

TEST_CASE("symmetric tensor conjugation blocks")
{
  CHECK(max_abs(w_tilde(stretch) - Eigen::Vector3d(4, 2, 1).asDiagonal().toDenseMatrix())
        < 1e-15);
  CHECK(max_abs(w_check(stretch) - Eigen::Vector3d(2, 1, 0.5).asDiagonal().toDenseMatrix())
        < 1e-15);
  CHECK(max_abs(w_breve(stretch)
                - Eigen::Vector3d(1, 0.5, 0.25).asDiagonal().toDenseMatrix())
        < 1e-15);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10; ++i)
  {
    const Mat2 J = affine_map(oracle::random_triangle(rng)).J;
    const Eigen::Vector3d x(0.3, -1.2, 0.8);
    Mat2 X;
    X << x[0], x[1], x[1], x[2];
    const Mat2 Y = J * X * J.transpose();
    const Eigen::Vector3d y = w_tilde(J) * x;
    CHECK(y[0] == Approx(Y(0, 0)));
    CHECK(y[1] == Approx(Y(0, 1)));
    CHECK(y[2] == Approx(Y(1, 1)));
  }
}

TEST_CASE("MTW edge block")
{
  const auto f = edge_frames(affine_map(stretched()));
  const Eigen::Matrix3d W = mtw_edge_block(f[2]);
  CHECK(max_abs(W - Eigen::Vector3d(1, 2, 1).asDiagonal().toDenseMatrix()) < 1e-15);
  CHECK(max_abs(mtw_edge_block_inverse(f[2])
                - Eigen::Vector3d(1, 0.5, 1).asDiagonal().toDenseMatrix())
        < 1e-15);
  for (const EdgeFrame& e : f)
  {
    CHECK(max_abs(mtw_edge_block(e) * mtw_edge_block_inverse(e) - Eigen::Matrix3d::Identity())
          < 1e-14);
    CHECK(max_abs(aw_edge_block(e) * aw_edge_block_inverse(e) - Eigen::Matrix4d::Identity())
          < 1e-14);
  }
}

TEST_CASE("transformation matrices")
{
  const AffineCellMap id = affine_map(reference_triangle());
  for (Family f : {Family::BDM1, Family::MTW, Family::AWnc, Family::AWc})
  {
    const TransformMatrix M = transform_matrix(f, id);
    CHECK(max_abs(M.dense() - Eigen::MatrixXd::Identity(M.size, M.size)) < 1e-14);
  }
  std::mt19937_64 rng(9);
  for (Family f : {Family::MTW, Family::AWnc, Family::AWc})
  {
    const TransformMatrix M = transform_matrix(f, affine_map(oracle::random_triangle(rng)));
    // M = P^T with P the inverse of the node push-forward
    const Eigen::MatrixXd P = M.dense_pushforward().inverse();
    CHECK(max_abs(M.dense() - P.transpose()) < 1e-10 * (1 + max_abs(P)));
    const Eigen::MatrixXd X = Eigen::MatrixXd::Random(M.size, 3);
    CHECK(max_abs(M.apply(X) - M.dense() * X) < 1e-12 * (1 + max_abs(M.dense())));
  }
}

TEST_CASE("physical Kronecker property on random cells")
{
  for (Family f : {Family::BDM1, Family::MTW, Family::AWnc, Family::AWc})
  {
    CAPTURE(family_name(f));
    std::mt19937_64 rng(2024);
    double worst = 0;
    for (int i = 0; i < 100; ++i)
    {
      const Eigen::MatrixXd V = oracle::physical_vandermonde(f, oracle::random_triangle(rng));
      worst = std::max(worst, max_abs(V - Eigen::MatrixXd::Identity(V.rows(), V.cols())));
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("DOF scaling rescales the basis")
{
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (Family f : {Family::MTW, Family::AWnc, Family::AWc})
  {
    const Triangle tri = oracle::random_triangle(rng);
    std::vector<double> s(reference_element(f)->dim());
    for (double& x : s)
      x = u(rng);
    const Eigen::MatrixXd V = oracle::physical_vandermonde(f, tri, s);
    for (int i = 0; i < V.rows(); ++i)
      for (int j = 0; j < V.cols(); ++j)
        CHECK(std::abs(V(i, j) - (i == j ? s[i] : 0.0)) < 1e-9);
  }
}

TEST_CASE("pullback identities")
{
  std::mt19937_64 rng(1);
  CHECK(feec_identity_checks(Mat2::Identity(), rng).max() < 1e-13);
  for (int i = 0; i < 50; ++i)
  {
    const Mat2 J = affine_map(oracle::random_triangle(rng)).J;
    const FeecReport r = feec_identity_checks(J, rng);
    CHECK(r.gradient <= 1e-10);
    CHECK(r.curl <= 1e-10);
    CHECK(r.airy <= 1e-10);
    CHECK(r.div <= 1e-10);
    CHECK(r.tensor_div <= 1e-10);
  }
}
