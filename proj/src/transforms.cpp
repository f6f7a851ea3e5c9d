#include "piolafe/transforms.hpp"
#include "piolafe/errors.hpp"
#include "piolafe/polynomial.hpp"
#include "piolafe/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace piolafe
{

namespace
{
void check_jacobian(const Mat2& J)
{
  const double d = J.determinant();
  if (!(std::abs(d) > 1e-14 * J.squaredNorm()))
    throw DegenerateJacobian("singular Jacobian");
}

Mat2 full(const double* s) { return (Mat2() << s[0], s[1], s[1], s[2]).finished(); }

double scale(std::span<const double> s, int i) { return s.empty() ? 1.0 : s[i]; }
} // namespace

//-----------------------------------------------------------------------------
Point piola_contravariant(const Mat2& J, const Point& vhat)
{
  check_jacobian(J);
  return J * vhat / J.determinant();
}
//-----------------------------------------------------------------------------
Eigen::Vector3d piola_double_contravariant(const Mat2& J,
                                           const Eigen::Vector3d& tauhat)
{
  check_jacobian(J);
  const double d = J.determinant();
  const Mat2 t = J * full(tauhat.data()) * J.transpose() / (d * d);
  return Eigen::Vector3d(t(0, 0), 0.5 * (t(0, 1) + t(1, 0)), t(1, 1));
}
//-----------------------------------------------------------------------------
Eigen::Matrix3d w_tilde(const Mat2& J)
{
  const double a = J(0, 0), b = J(0, 1), c = J(1, 0), d = J(1, 1);
  Eigen::Matrix3d W;
  W << a * a, 2 * a * b, b * b,
      a * c, a * d + b * c, b * d,
      c * c, 2 * c * d, d * d;
  return W;
}
//-----------------------------------------------------------------------------
Eigen::Matrix3d w_check(const Mat2& J)
{
  check_jacobian(J);
  return w_tilde(J) / std::abs(J.determinant());
}
//-----------------------------------------------------------------------------
Eigen::Matrix3d w_breve(const Mat2& J)
{
  check_jacobian(J);
  const double d = J.determinant();
  return w_tilde(J) / (d * d);
}
//-----------------------------------------------------------------------------
Eigen::Matrix3d mtw_edge_block(const EdgeFrame& f)
{
  Eigen::Matrix3d W;
  W << 1, 0, 0, f.alpha, f.beta, 0, 0, 0, 1;
  return W;
}
//-----------------------------------------------------------------------------
Eigen::Matrix3d mtw_edge_block_inverse(const EdgeFrame& f)
{
  if (f.beta == 0.0)
    throw DegenerateJacobian("beta vanishes");
  Eigen::Matrix3d W;
  W << 1, 0, 0, -f.alpha / f.beta, 1 / f.beta, 0, 0, 0, 1;
  return W;
}
//-----------------------------------------------------------------------------
Eigen::Matrix4d aw_edge_block(const EdgeFrame& f)
{
  Eigen::Matrix4d W = Eigen::Matrix4d::Zero();
  for (int i : {0, 2})
  {
    W(i, i) = 1;
    W(i + 1, i) = f.alpha;
    W(i + 1, i + 1) = f.beta;
  }
  return f.length_ratio * W;
}
//-----------------------------------------------------------------------------
Eigen::Matrix4d aw_edge_block_inverse(const EdgeFrame& f)
{
  if (f.beta == 0.0)
    throw DegenerateJacobian("beta vanishes");
  Eigen::Matrix4d W = Eigen::Matrix4d::Zero();
  for (int i : {0, 2})
  {
    W(i, i) = 1;
    W(i + 1, i) = -f.alpha / f.beta;
    W(i + 1, i + 1) = 1 / f.beta;
  }
  return W / f.length_ratio;
}
//-----------------------------------------------------------------------------
Eigen::MatrixXd TransformMatrix::dense() const
{
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(size, size);
  for (const Block& b : blocks)
    D.block(b.offset, b.offset, b.M.rows(), b.M.cols()) = b.M;
  return D;
}
//-----------------------------------------------------------------------------
Eigen::MatrixXd TransformMatrix::dense_pushforward() const
{
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(size, size);
  for (const Block& b : blocks)
    D.block(b.offset, b.offset, b.M.rows(), b.M.cols()) = b.pushforward;
  return D;
}
//-----------------------------------------------------------------------------
Eigen::MatrixXd TransformMatrix::apply(const Eigen::MatrixXd& in) const
{
  Eigen::MatrixXd out(in.rows(), in.cols());
  for (const Block& b : blocks)
  {
    const int n = static_cast<int>(b.M.rows());
    out.middleRows(b.offset, n).noalias() = b.M * in.middleRows(b.offset, n);
  }
  return out;
}
//-----------------------------------------------------------------------------
namespace
{
// M block = diag(s) (W^{-1})^T given W and its inverse
template <typename Mat>
void add_block(TransformMatrix& T, int offset, const Mat& W, const Mat& Winv,
               std::span<const double> s)
{
  TransformMatrix::Block b;
  b.offset = offset;
  b.pushforward = W;
  b.M = Winv.transpose();
  for (int i = 0; i < b.M.rows(); ++i)
    b.M.row(i) *= scale(s, offset + i);
  T.blocks.push_back(std::move(b));
}

TransformMatrix identity_transform(Family family, int n,
                                   std::span<const double> s)
{
  TransformMatrix T;
  T.family = family;
  T.size = n;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  add_block(T, 0, I, I, s);
  return T;
}
} // namespace
//-----------------------------------------------------------------------------
TransformMatrix mtw_transform(const AffineCellMap& map,
                              std::span<const double> scaling)
{
  check_jacobian(map.J);
  const auto frames = edge_frames(map);
  TransformMatrix T;
  T.family = Family::MTW;
  T.size = 9;
  for (int k = 0; k < 3; ++k)
  {
    const Eigen::Matrix3d W = mtw_edge_block(frames[k]);
    const Eigen::Matrix3d Wi = mtw_edge_block_inverse(frames[k]);
    add_block(T, 3 * k, W, Wi, scaling);
  }
  return T;
}
//-----------------------------------------------------------------------------
TransformMatrix awnc_transform(const AffineCellMap& map,
                               std::span<const double> scaling)
{
  check_jacobian(map.J);
  const auto frames = edge_frames(map);
  TransformMatrix T;
  T.family = Family::AWnc;
  T.size = 15;
  for (int k = 0; k < 3; ++k)
  {
    const Eigen::Matrix4d W = aw_edge_block(frames[k]);
    const Eigen::Matrix4d Wi = aw_edge_block_inverse(frames[k]);
    add_block(T, 4 * k, W, Wi, scaling);
  }
  const Eigen::Matrix3d W = w_check(map.J);
  const Eigen::Matrix3d Wi = w_check(map.Jinv);
  add_block(T, 12, W, Wi, scaling);
  return T;
}
//-----------------------------------------------------------------------------
TransformMatrix awc_transform(const AffineCellMap& map,
                              std::span<const double> scaling)
{
  check_jacobian(map.J);
  const auto frames = edge_frames(map);
  TransformMatrix T;
  T.family = Family::AWc;
  T.size = 24;
  const Eigen::Matrix3d V = w_breve(map.J);
  const Eigen::Matrix3d Vi = w_breve(map.Jinv);
  for (int v = 0; v < 3; ++v)
    add_block(T, 3 * v, V, Vi, scaling);
  for (int k = 0; k < 3; ++k)
  {
    const Eigen::Matrix4d W = aw_edge_block(frames[k]);
    const Eigen::Matrix4d Wi = aw_edge_block_inverse(frames[k]);
    add_block(T, 9 + 4 * k, W, Wi, scaling);
  }
  const Eigen::Matrix3d W = w_check(map.J);
  const Eigen::Matrix3d Wi = w_check(map.Jinv);
  add_block(T, 21, W, Wi, scaling);
  return T;
}
//-----------------------------------------------------------------------------
TransformMatrix transform_matrix(Family family, const AffineCellMap& map,
                                 std::span<const double> scaling)
{
  switch (family)
  {
  case Family::MTW:
    return mtw_transform(map, scaling);
  case Family::AWnc:
    return awnc_transform(map, scaling);
  case Family::AWc:
    return awc_transform(map, scaling);
  case Family::BDM1:
    return identity_transform(family, 6, scaling);
  case Family::DG0:
    return identity_transform(family, 1, scaling);
  case Family::DG1:
    return identity_transform(family, 6, scaling);
  }
  throw Error("unknown family");
}
//-----------------------------------------------------------------------------
Tabulation piola_map(const ReferenceElement& e, const AffineCellMap& map,
                     const Tabulation& ref)
{
  const int nf = ref.num_functions();
  const int np = ref.num_points();
  const int vs = ref.value_size();
  const bool grad = ref.has_gradients();
  Tabulation out(nf, np, vs, grad);
  const Mat2& J = map.J;
  const Mat2& Ji = map.Jinv;
  const double det = map.detJ;

  for (int f = 0; f < nf; ++f)
    for (int p = 0; p < np; ++p)
    {
      const double* v = ref.values_at(f, p);
      const double* g = grad ? ref.gradients_at(f, p) : nullptr;
      switch (e.mapping)
      {
      case MappingKind::identity:
        for (int c = 0; c < vs; ++c)
        {
          out.value(f, p, c) = v[c];
          if (grad)
            for (int d = 0; d < 2; ++d)
              out.gradient(f, p, c, d) = g[2 * c] * Ji(0, d) + g[2 * c + 1] * Ji(1, d);
        }
        break;
      case MappingKind::contravariant_piola:
      {
        const Point w = J * Point(v[0], v[1]) / det;
        out.value(f, p, 0) = w.x();
        out.value(f, p, 1) = w.y();
        if (grad)
        {
          Mat2 G;
          G << g[0], g[1], g[2], g[3];
          const Mat2 Gp = J * G * Ji / det;
          for (int c = 0; c < 2; ++c)
            for (int d = 0; d < 2; ++d)
              out.gradient(f, p, c, d) = Gp(c, d);
        }
        break;
      }
      case MappingKind::double_contravariant_piola:
      {
        const double s = 1.0 / (det * det);
        const Mat2 t = J * full(v) * J.transpose() * s;
        out.value(f, p, 0) = t(0, 0);
        out.value(f, p, 1) = t(0, 1);
        out.value(f, p, 2) = t(1, 1);
        if (grad)
        {
          // d tau / d x_d = sum_e (J dhat_e tauhat J^T) Jinv(e, d) / det^2
          std::array<Mat2, 2> dt;
          for (int ed = 0; ed < 2; ++ed)
          {
            const double st[3] = {g[ed], g[2 + ed], g[4 + ed]};
            dt[ed] = J * full(st) * J.transpose() * s;
          }
          for (int d = 0; d < 2; ++d)
          {
            const Mat2 m = dt[0] * Ji(0, d) + dt[1] * Ji(1, d);
            out.gradient(f, p, 0, d) = m(0, 0);
            out.gradient(f, p, 1, d) = m(0, 1);
            out.gradient(f, p, 2, d) = m(1, 1);
          }
        }
        break;
      }
      }
    }
  return out;
}
//-----------------------------------------------------------------------------
Tabulation push_forward(const ReferenceElement& e, const AffineCellMap& map,
                        const TransformMatrix& M, const Tabulation& ref)
{
  Tabulation t = piola_map(e, map, ref);
  const int nf = t.num_functions();
  const int stride = t.num_points() * t.value_size();
  auto transform = [&](std::vector<double>& raw, int width)
  {
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                              Eigen::RowMajor>>
        A(raw.data(), nf, stride * width);
    A = M.apply(A).eval();
  };
  transform(t.raw_values(), 1);
  if (t.has_gradients())
    transform(t.raw_gradients(), 2);
  return t;
}
//-----------------------------------------------------------------------------
double FeecReport::max() const
{
  return std::max({gradient, curl, airy, div, tensor_div});
}
//-----------------------------------------------------------------------------
FeecReport feec_identity_checks(const Mat2& J, std::mt19937_64& rng,
                                int samples)
{
  check_jacobian(J);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Point b(u(rng), u(rng));
  const Mat2 Ji = J.inverse();
  const double det = J.determinant();
  const Point bi = -Ji * b;
  const QuadratureRule& rule = quadrature(Domain::triangle, 6);

  FeecReport r;
  auto rel = [](double& acc, double a, double ref)
  { acc = std::max(acc, std::abs(a - ref) / (1.0 + std::abs(ref))); };

  for (int s = 0; s < samples; ++s)
  {
    // scalar potential: phi = phihat o F^{-1}
    const Polynomial ph = Polynomial::random(3, rng);
    const Polynomial p = ph.compose_affine(Ji, bi);
    const Polynomial px = p.dx(), py = p.dy();
    const Polynomial phx = ph.dx(), phy = ph.dy();
    const Polynomial pxx = px.dx(), pxy = px.dy(), pyy = py.dy();
    const Polynomial phxx = phx.dx(), phxy = phx.dy(), phyy = phy.dy();

    // vector field and symmetric tensor field on the reference cell
    const std::array<Polynomial, 2> vh
        = {Polynomial::random(3, rng), Polynomial::random(3, rng)};
    const std::array<Polynomial, 3> th
        = {Polynomial::random(3, rng), Polynomial::random(3, rng),
           Polynomial::random(3, rng)};
    // physical fields v = J vhat / det, tau = J tauhat J^T / det^2
    std::array<Polynomial, 2> vp;
    for (int i = 0; i < 2; ++i)
      vp[i] = (vh[0] * J(i, 0) + vh[1] * J(i, 1)).compose_affine(Ji, bi) * (1.0 / det);
    // entries of J T J^T with T symmetric (t0, t1; t1, t2)
    auto jtj = [&](int i, int j)
    {
      return th[0] * (J(i, 0) * J(j, 0)) + th[1] * (J(i, 0) * J(j, 1) + J(i, 1) * J(j, 0))
             + th[2] * (J(i, 1) * J(j, 1));
    };
    std::array<std::array<Polynomial, 2>, 2> tp;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        tp[i][j] = jtj(i, j).compose_affine(Ji, bi) * (1.0 / (det * det));

    for (const Point& xh : rule.points)
    {
      const Point x = J * xh + b;
      // gradient
      const Point gh(phx(xh), phy(xh));
      const Point g = Ji.transpose() * gh;
      rel(r.gradient, px(x), g.x());
      rel(r.gradient, py(x), g.y());
      // curl phi = (phi_y, -phi_x)
      const Point ch(phy(xh), -phx(xh));
      const Point c = J * ch / det;
      rel(r.curl, py(x), c.x());
      rel(r.curl, -px(x), c.y());
      // airy
      Mat2 ah;
      ah << phyy(xh), -phxy(xh), -phxy(xh), phxx(xh);
      const Mat2 a = J * ah * J.transpose() / (det * det);
      rel(r.airy, pyy(x), a(0, 0));
      rel(r.airy, -pxy(x), a(0, 1));
      rel(r.airy, pxx(x), a(1, 1));
      // div of the contravariant map
      const double dh = vh[0].dx()(xh) + vh[1].dy()(xh);
      rel(r.div, vp[0].dx()(x) + vp[1].dy()(x), dh / det);
      // row-wise Div of the double map
      const Point Dh(th[0].dx()(xh) + th[1].dy()(xh), th[1].dx()(xh) + th[2].dy()(xh));
      const Point D = J * Dh / (det * det);
      rel(r.tensor_div, tp[0][0].dx()(x) + tp[0][1].dy()(x), D.x());
      rel(r.tensor_div, tp[1][0].dx()(x) + tp[1][1].dy()(x), D.y());
    }
  }
  return r;
}
//-----------------------------------------------------------------------------

} // namespace piolafe
