#include "piolafe/harness.hpp"
#include "piolafe/errors.hpp"
#include "piolafe/quadrature.hpp"
#include "piolafe/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

namespace piolafe
{
namespace
{
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::string format_value(double v, bool integer)
{
  if (std::isnan(v))
    return "";
  char buf[64];
  if (integer)
    std::snprintf(buf, sizeof buf, "%.0f", v);
  else
    std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

// weights on stored components of w . f (vector) or n^T tau s (symmetric)
Eigen::RowVectorXd trace_row(ValueShape shape, const Point& n, const Point& s)
{
  Eigen::RowVectorXd w(value_size(shape));
  if (shape == ValueShape::vector)
    w << s.x(), s.y();
  else
    w << n.x() * s.x(), n.x() * s.y() + n.y() * s.x(), n.y() * s.y();
  return w;
}

// DOF functionals of an element written on the physical cell
std::vector<Functional> physical_functionals(const ReferenceElement& el,
                                             const AffineCellMap& map)
{
  const auto frames = edge_frames(map);
  const int vs = el.value_size();
  const QuadratureRule& line = quadrature(Domain::interval, 12);
  const QuadratureRule& tri = quadrature(Domain::triangle, 4);
  const double area = map.target.area();
  std::vector<Functional> out;
  for (const DofDescriptor& d : el.dofs)
  {
    Functional l;
    switch (d.kind)
    {
    case DofKind::vertex_component:
      l.points.push_back(map.target.vertices[d.entity_index]);
      l.weights = Eigen::MatrixXd::Zero(1, vs);
      l.weights(0, d.component) = 1.0;
      break;
    case DofKind::point_value:
      l.points.push_back(map(el.functionals[&d - el.dofs.data()].points[0]));
      l.weights = Eigen::MatrixXd::Zero(1, vs);
      l.weights(0, d.component) = 1.0;
      break;
    case DofKind::interior_moment:
      l.weights = Eigen::MatrixXd::Zero(tri.points.size(), vs);
      for (std::size_t q = 0; q < tri.points.size(); ++q)
      {
        l.points.push_back(map(tri.points[q]));
        l.weights(q, d.component) = 2.0 * area * tri.weights[q];
      }
      break;
    default:
    {
      const EdgeFrame& fr = frames[d.entity_index];
      const Point a = map.target.vertices[edge_vertices[d.entity_index][0]];
      const bool normal = d.kind == DofKind::edge_normal_moment
                          || d.kind == DofKind::edge_nn_moment;
      const Eigen::RowVectorXd w
          = trace_row(el.shape, fr.normal, normal ? fr.normal : fr.tangent);
      l.weights.resize(line.points.size(), vs);
      for (std::size_t q = 0; q < line.points.size(); ++q)
      {
        const double s = line.points[q].x();
        l.points.push_back(a + s * fr.vector);
        l.weights.row(q) = fr.length * line.weights[q] * shifted_legendre(d.order, s) * w;
      }
    }
    }
    out.push_back(std::move(l));
  }
  return out;
}

// Mapped basis at physical points
Tabulation mapped_basis(const ReferenceElement& el, const AffineCellMap& map,
                        const std::vector<Point>& x, int nderiv)
{
  std::vector<Point> xh;
  xh.reserve(x.size());
  for (const Point& p : x)
    xh.push_back(map.pullback_point(p));
  const Tabulation ref = tabulate(el, xh, nderiv);
  return push_forward(el, map, transform_matrix(el.family, map), ref);
}

// Least squares residual of fitting samples with the columns of P
double fit_residual(const Eigen::MatrixXd& P, const Eigen::VectorXd& v)
{
  const Eigen::VectorXd c = P.colPivHouseholderQr().solve(v);
  return (P * c - v).cwiseAbs().maxCoeff();
}

std::string join(const std::vector<double>& v)
{
  std::string s;
  for (double x : v)
    s += (s.empty() ? "" : " ") + format_value(x, false);
  return s;
}

// (max - min) / max
double spread(const std::vector<double>& v)
{
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return (*hi - *lo) / *hi;
}

void describe_mesh(ExperimentReport& rep, const MeshOptions& m)
{
  rep.metadata["N"] = "refinement factor of the base mesh";
  if (!m.path.empty())
  {
    rep.metadata["mesh"] = m.path;
    return;
  }
  rep.metadata["seed"] = std::to_string(m.seed);
  rep.metadata["base"] = std::to_string(m.base);
  rep.metadata["warp"] = format_value(m.warp, false);
  rep.metadata["pattern"] = m.pattern == Pattern::right ? "right" : "crossed";
}
} // namespace

//-----------------------------------------------------------------------------
void ExperimentReport::add_column(const std::string& name, bool integer)
{
  columns.push_back(name);
  integer_column.push_back(integer);
}
//-----------------------------------------------------------------------------
int ExperimentReport::column(const std::string& name) const
{
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end())
    throw Error("no report column " + name);
  return static_cast<int>(it - columns.begin());
}
//-----------------------------------------------------------------------------
void ExperimentReport::add_row(const std::vector<double>& values)
{
  if (values.size() != columns.size())
    throw Error("report row has the wrong length");
  rows.push_back(values);
}
//-----------------------------------------------------------------------------
double ExperimentReport::at(std::size_t row, const std::string& name) const
{
  return rows.at(row)[column(name)];
}
//-----------------------------------------------------------------------------
std::vector<std::size_t> ExperimentReport::select(const std::string& name,
                                                  double value) const
{
  const int c = column(name);
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (rows[r][c] == value)
      out.push_back(r);
  return out;
}
//-----------------------------------------------------------------------------
void ExperimentReport::write_csv(std::ostream& out) const
{
  out << "# experiment=" << id << "\n";
  for (const auto& [k, v] : metadata)
    out << "# " << k << "=" << v << "\n";
  for (std::size_t c = 0; c < columns.size(); ++c)
    out << (c ? "," : "") << columns[c];
  out << "\n";
  char buf[64];
  for (const auto& row : rows)
  {
    for (std::size_t c = 0; c < row.size(); ++c)
    {
      if (c)
        out << ",";
      if (std::isnan(row[c]))
        continue;
      if (integer_column[c])
        std::snprintf(buf, sizeof buf, "%.0f", row[c]);
      else
        std::snprintf(buf, sizeof buf, "%.17g", row[c]);
      out << buf;
    }
    out << "\n";
  }
}
//-----------------------------------------------------------------------------
void ExperimentReport::save_csv(const std::string& path) const
{
  std::ofstream f(path);
  if (!f)
    throw Error("cannot write " + path);
  write_csv(f);
}
//-----------------------------------------------------------------------------
void ExperimentReport::write_markdown(std::ostream& out) const
{
  out << "### " << id << "\n\n";
  for (const auto& [k, v] : metadata)
    out << "- " << k << ": " << v << "\n";
  if (!metadata.empty())
    out << "\n";
  out << "|";
  for (const auto& c : columns)
    out << " " << c << " |";
  out << "\n|";
  for (std::size_t c = 0; c < columns.size(); ++c)
    out << "---|";
  out << "\n";
  for (const auto& row : rows)
  {
    out << "|";
    for (std::size_t c = 0; c < row.size(); ++c)
      out << " " << format_value(row[c], integer_column[c]) << " |";
    out << "\n";
  }
}
//-----------------------------------------------------------------------------
double eoc(double previous, double current) { return std::log2(previous / current); }
//-----------------------------------------------------------------------------
std::vector<std::shared_ptr<const Mesh>> mesh_hierarchy(const MeshOptions& opts,
                                                        int levels)
{
  if (!opts.path.empty())
  {
    std::vector<std::shared_ptr<const Mesh>> out;
    out.push_back(std::make_shared<const Mesh>(load_mesh(opts.path)));
    for (int l = 1; l < levels; ++l)
      out.push_back(std::make_shared<const Mesh>(refine_uniform(*out.back())));
    return out;
  }
  Mesh base = structured_rectangle(opts.base, opts.base, opts.pattern);
  if (opts.warp > 0.0)
    base = perturb_interior(base, opts.warp, opts.seed);
  std::vector<std::shared_ptr<const Mesh>> out;
  out.push_back(std::make_shared<const Mesh>(std::move(base)));
  for (int l = 1; l < levels; ++l)
    out.push_back(std::make_shared<const Mesh>(refine_uniform(*out.back())));
  return out;
}
//-----------------------------------------------------------------------------
Triangle random_triangle(std::mt19937_64& rng)
{
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (;;)
  {
    Triangle t{{Point(u(rng), u(rng)), Point(u(rng), u(rng)), Point(u(rng), u(rng))}};
    const double d = t.diameter();
    if (t.area() > 0.05 * d * d)
      return t;
  }
}
//-----------------------------------------------------------------------------
double kronecker_residual(Family family, const Triangle& cell)
{
  const auto el = reference_element(family);
  const AffineCellMap map = affine_map(cell);
  const auto fun = physical_functionals(*el, map);
  const int n = el->dim();
  const int vs = el->value_size();
  double r = 0.0;
  for (int i = 0; i < n; ++i)
  {
    const Tabulation t = mapped_basis(*el, map, fun[i].points, 0);
    for (int j = 0; j < n; ++j)
    {
      double s = 0.0;
      for (int q = 0; q < t.num_points(); ++q)
        for (int c = 0; c < vs; ++c)
          s += fun[i].weights(q, c) * t.value(j, q, c);
      r = std::max(r, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  }
  return r;
}
//-----------------------------------------------------------------------------
double constraint_residual(Family family, const Triangle& cell)
{
  const auto el = reference_element(family);
  const AffineCellMap map = affine_map(cell);
  const int n = el->dim();
  const double h = cell.diameter();
  double r = 0.0;
  if (family == Family::MTW || family == Family::AWc)
  {
    const QuadratureRule& rule = quadrature(Domain::triangle, 6);
    std::vector<Point> x;
    for (const Point& p : rule.points)
      x.push_back(map(p));
    const Tabulation t = mapped_basis(*el, map, x, 1);
    const int np = t.num_points();
    // constants (MTW) or P1 (AW^c) on the sample points
    Eigen::MatrixXd P(np, family == Family::MTW ? 1 : 3);
    for (int q = 0; q < np; ++q)
    {
      P(q, 0) = 1.0;
      if (family == Family::AWc)
      {
        P(q, 1) = (x[q].x() - map.translation.x()) / h;
        P(q, 2) = (x[q].y() - map.translation.y()) / h;
      }
    }
    for (int j = 0; j < n; ++j)
    {
      const int rowsn = family == Family::MTW ? 1 : 2;
      Eigen::MatrixXd div(np, rowsn);
      double scale = 0.0;
      for (int q = 0; q < np; ++q)
      {
        const double* g = t.gradients_at(j, q);
        if (family == Family::MTW)
          div(q, 0) = g[0] + g[3];
        else
        {
          // stored (11, 12, 22), layout [c * 2 + d]
          div(q, 0) = g[0] + g[3];
          div(q, 1) = g[2] + g[5];
        }
        for (int c = 0; c < t.value_size(); ++c)
          scale = std::max(scale, std::abs(t.value(j, q, c)) / h);
      }
      scale = std::max(scale, div.cwiseAbs().maxCoeff());
      for (int k = 0; k < rowsn; ++k)
        r = std::max(r, fit_residual(P, div.col(k)) / scale);
    }
  }
  else if (family == Family::AWnc)
  {
    const auto frames = edge_frames(map);
    const QuadratureRule& line = quadrature(Domain::interval, 8);
    // size of each basis function over the whole cell
    const QuadratureRule& rule = quadrature(Domain::triangle, 6);
    std::vector<Point> xc;
    for (const Point& p : rule.points)
      xc.push_back(map(p));
    const Tabulation tc = mapped_basis(*el, map, xc, 0);
    std::vector<double> size(n, 0.0);
    for (int j = 0; j < n; ++j)
      for (int q = 0; q < tc.num_points(); ++q)
        for (int c = 0; c < 3; ++c)
          size[j] = std::max(size[j], std::abs(tc.value(j, q, c)));
    for (int k = 0; k < 3; ++k)
    {
      const Point a = map.target.vertices[edge_vertices[k][0]];
      std::vector<Point> x;
      Eigen::MatrixXd P(line.points.size(), 2);
      for (std::size_t q = 0; q < line.points.size(); ++q)
      {
        const double s = line.points[q].x();
        x.push_back(a + s * frames[k].vector);
        P(q, 0) = 1.0;
        P(q, 1) = s;
      }
      const Tabulation t = mapped_basis(*el, map, x, 0);
      const Eigen::RowVectorXd w = trace_row(el->shape, frames[k].normal, frames[k].normal);
      for (int j = 0; j < n; ++j)
      {
        Eigen::VectorXd nn(t.num_points());
        double scale = size[j];
        for (int q = 0; q < t.num_points(); ++q)
        {
          nn[q] = 0.0;
          for (int c = 0; c < 3; ++c)
          {
            nn[q] += w[c] * t.value(j, q, c);
            scale = std::max(scale, std::abs(t.value(j, q, c)));
          }
        }
        if (scale > 0.0)
          r = std::max(r, fit_residual(P, nn) / scale);
      }
    }
  }
  return r;
}
//-----------------------------------------------------------------------------
double conformity_residual(const GlobalSpace& V, int samples, std::uint64_t seed)
{
  const Mesh& m = V.mesh();
  const ValueShape shape = V.element().shape;
  const int vs = V.element().value_size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd X(V.num_dofs(), samples);
  for (int i = 0; i < X.size(); ++i)
    X.data()[i] = u(rng);
  const QuadratureRule& line = quadrature(Domain::interval, 8);
  double jump = 0.0, scale = 0.0;
  for (int e = 0; e < m.num_edges(); ++e)
  {
    if (m.is_boundary_edge(e))
      continue;
    const auto& ev = m.edges()[e];
    const Point a = m.vertices()[ev[0]], b = m.vertices()[ev[1]];
    const Point n = rotate((b - a).normalized());
    std::vector<Point> x;
    for (const Point& s : line.points)
      x.push_back(a + s.x() * (b - a));
    std::array<Eigen::MatrixXd, 2> trace;
    for (int side = 0; side < 2; ++side)
    {
      const int c = m.edge_cells(e)[side];
      const AffineCellMap map = V.cell_map(c);
      std::vector<Point> xh;
      for (const Point& p : x)
        xh.push_back(map.pullback_point(p));
      const Tabulation t = V.cell_basis(c, xh, 0);
      const auto dofs = V.cell_dofs(c);
      const int nt = shape == ValueShape::vector ? 1 : 2;
      // trace(q * nt + k, sample)
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(x.size() * nt, samples);
      for (int j = 0; j < t.num_functions(); ++j)
        for (int q = 0; q < t.num_points(); ++q)
        {
          const double* v = t.values_at(j, q);
          double tr[2];
          if (shape == ValueShape::vector)
            tr[0] = v[0] * n.x() + v[1] * n.y();
          else
          {
            tr[0] = v[0] * n.x() + v[1] * n.y();
            tr[1] = v[1] * n.x() + v[2] * n.y();
          }
          for (int k = 0; k < nt; ++k)
            T.row(q * nt + k) += tr[k] * X.row(dofs[j]);
        }
      trace[side] = T;
      (void)vs;
    }
    jump = std::max(jump, (trace[0] - trace[1]).cwiseAbs().maxCoeff());
    scale = std::max(scale, trace[0].cwiseAbs().maxCoeff());
  }
  return scale > 0.0 ? jump / scale : 0.0;
}
//-----------------------------------------------------------------------------
VerifyResult verify_element(Family family, int cells, std::uint64_t seed)
{
  VerifyResult r;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < cells; ++i)
  {
    const Triangle t = i == 0 ? reference_triangle() : random_triangle(rng);
    r.kronecker = std::max(r.kronecker, kronecker_residual(family, t));
    r.constraint = std::max(r.constraint, constraint_residual(family, t));
    r.feec = std::max(r.feec, feec_identity_checks(affine_map(t).J, rng).max());
  }
  if (family == Family::AWnc || family == Family::DG0 || family == Family::DG1)
    r.conformity = nan;
  else
  {
    const auto meshes = mesh_hierarchy(MeshOptions{}, 1);
    const auto V = build_global_space(meshes[0], family);
    r.conformity = conformity_residual(*V, 20, seed);
  }
  return r;
}
//-----------------------------------------------------------------------------
ExperimentReport run_verify(Family family, int cells, std::uint64_t seed)
{
  ExperimentReport rep;
  rep.id = "verify-" + family_name(family);
  rep.metadata["seed"] = std::to_string(seed);
  rep.metadata["conformity_mesh"] = "4x4 right, warp 0.2";
  rep.add_column("cells", true);
  rep.add_column("kronecker");
  rep.add_column("constraint");
  rep.add_column("feec");
  rep.add_column("conformity");
  const VerifyResult v = verify_element(family, cells, seed);
  rep.add_row({double(cells), v.kronecker, v.constraint, v.feec, v.conformity});
  return rep;
}
//-----------------------------------------------------------------------------
ExperimentReport run_mtw_convergence(const std::vector<double>& eps, int levels,
                                     const MeshOptions& mopts)
{
  ExperimentReport rep;
  rep.id = "convergence-mtw";
  describe_mesh(rep, mopts);
  rep.metadata["solver"] = direct_solver_name();
  for (const char* c : {"eps", "level", "N", "dofs"})
    rep.add_column(c, std::string(c) != "eps");
  for (const char* c : {"u_err", "u_eoc", "p_err", "p_eoc"})
    rep.add_column(c);
  const auto meshes = mesh_hierarchy(mopts, levels);
  std::vector<std::shared_ptr<GlobalSpace>> V, Q;
  for (const auto& m : meshes)
  {
    V.push_back(build_global_space(m, Family::MTW));
    Q.push_back(build_global_space(m, Family::DG0));
  }
  for (double e : eps)
  {
    const ProblemSpec spec = mtw_manufactured(e);
    ErrorRecord prev;
    for (int l = 0; l < levels; ++l)
    {
      const LinearSystem sys = assemble_mtw_stokes_darcy(*V[l], *Q[l], spec);
      const Eigen::VectorXd x = direct_solve(sys.matrix, sys.rhs);
      const ErrorRecord err = compute_errors(x, spec, *V[l], Q[l].get());
      rep.add_row({e, double(l), double(1 << l), double(sys.size()), err.u,
                   l ? eoc(prev.u, err.u) : nan, err.p, l ? eoc(prev.p, err.p) : nan});
      prev = err;
    }
  }
  return rep;
}
//-----------------------------------------------------------------------------
ExperimentReport run_hr_convergence(Family family, const std::vector<double>& nu,
                                    int levels, const MeshOptions& mopts)
{
  ExperimentReport rep;
  rep.id = "convergence-" + family_name(family);
  describe_mesh(rep, mopts);
  rep.metadata["solver"] = direct_solver_name();
  for (const char* c : {"nu", "level", "N", "dofs"})
    rep.add_column(c, std::string(c) != "nu");
  for (const char* c :
       {"u_err", "u_eoc", "sigma_err", "sigma_eoc", "div_err", "div_eoc"})
    rep.add_column(c);
  const auto meshes = mesh_hierarchy(mopts, levels);
  std::vector<std::shared_ptr<GlobalSpace>> S, U;
  for (const auto& m : meshes)
  {
    S.push_back(build_global_space(m, family));
    U.push_back(build_global_space(m, Family::DG1));
  }
  for (double v : nu)
  {
    const ProblemSpec spec = hr_manufactured(family, v);
    ErrorRecord prev;
    for (int l = 0; l < levels; ++l)
    {
      const LinearSystem sys = assemble_hr(*S[l], *U[l], spec);
      const Eigen::VectorXd x = direct_solve(sys.matrix, sys.rhs);
      const ErrorRecord err = compute_errors(x, spec, *S[l], U[l].get());
      rep.add_row({v, double(l), double(1 << l), double(sys.size()), err.u,
                   l ? eoc(prev.u, err.u) : nan, err.sigma,
                   l ? eoc(prev.sigma, err.sigma) : nan, err.div_sigma,
                   l ? eoc(prev.div_sigma, err.div_sigma) : nan});
      prev = err;
    }
  }
  return rep;
}
//-----------------------------------------------------------------------------
ExperimentReport run_beam(const std::vector<double>& nu, const BeamOptions& opts)
{
  ExperimentReport rep;
  rep.id = "beam";
  rep.metadata["mesh"] = std::to_string(opts.nx) + "x" + std::to_string(opts.ny)
                         + (opts.pattern == Pattern::right ? " right" : " crossed")
                         + ", refined " + std::to_string(opts.refine);
  rep.metadata["rtol"] = format_value(opts.rtol, false);
  rep.metadata["preconditioner"]
      = opts.coarse_space ? "vertex-star ASM + P1 coarse" : "vertex-star ASM";
  rep.add_column("nu");
  rep.add_column("dofs", true);
  rep.add_column("iterations", true);
  rep.add_column("converged", true);
  rep.add_column("tip_deflection");
  rep.add_column("direct_diff");

  Mesh mesh = structured_rectangle(opts.nx, opts.ny, opts.pattern, 25.0, 1.0);
  for (int r = 0; r < opts.refine; ++r)
    mesh = refine_uniform(mesh);
  const auto mp = std::make_shared<const Mesh>(std::move(mesh));
  const auto V = build_global_space(mp, Family::MTW);
  const VertexStarDecomposition dec = vertex_star_decomposition(*V);

  for (double v : nu)
  {
    const ProblemSpec spec = beam_problem(v);
    const LinearSystem sys = assemble_mtw_primal_elasticity(*V, spec);
    AdditiveSchwarz pc(sys.matrix, dec);
    if (opts.coarse_space)
      pc.set_coarse_space(p1_prolongation(*V, sys.constrained_dofs));
    FgmresConfig cfg;
    cfg.rtol = opts.rtol;
    const SolveResult sol = fgmres(sys.matrix, sys.rhs, &pc, cfg);
    const Eigen::VectorXd xd = direct_solve(sys.matrix, sys.rhs);

    // mean vertical displacement at the midpoints of the free end
    double tip = 0.0;
    int count = 0;
    for (int e = 0; e < mp->num_edges(); ++e)
    {
      if (!mp->is_boundary_edge(e) || mp->edge_tag(e) != BoundaryTag::right)
        continue;
      const int c = mp->edge_cells(e)[0];
      const Point xh = V->cell_map(c).pullback_point(mp->edge_midpoint(e));
      Eigen::MatrixXd val;
      V->evaluate(sol.x, c, std::span<const Point>(&xh, 1), val);
      tip += val(0, 1);
      ++count;
    }
    rep.add_row({v, double(sys.size()), double(sol.iterations),
                 sol.converged ? 1.0 : 0.0, tip / count,
                 (sol.x - xd).norm() / xd.norm()});
  }
  return rep;
}
//-----------------------------------------------------------------------------
namespace
{
struct NitscheSolve
{
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = true;
  double direct_diff = nan;
};

NitscheSolve solve_nitsche(const LinearSystem& sys, const GlobalSpace& S,
                           const GlobalSpace& U, double alpha,
                           const TractionOptions& opts)
{
  NitscheSolve out;
  const Eigen::VectorXd xd = direct_solve(sys.matrix, sys.rhs);
  if (!(alpha > 0.0) || !opts.iterative)
  {
    out.x = xd;
    return out;
  }
  const SparseMatrix A = primary_block(sys);
  AdditiveSchwarz asm_(A, vertex_star_decomposition(S));
  if (opts.coarse_space)
    asm_.set_coarse_space(p1_prolongation(S));
  std::unique_ptr<Chebyshev> cheb;
  const LinearOperator* inner = &asm_;
  if (opts.chebyshev_sweeps > 0)
  {
    cheb = std::make_unique<Chebyshev>(A, asm_, opts.chebyshev_sweeps);
    inner = cheb.get();
  }
  const SparseMatrix Mu = assemble_mass(U);
  CellBlockInverse minv(Mu, U);
  BlockALPreconditioner pc(sys, *inner, minv, alpha);
  FgmresConfig cfg;
  cfg.rtol = opts.rtol;
  cfg.atol = opts.atol;
  cfg.max_iterations = opts.max_iterations;
  const SolveResult sol = fgmres(sys.matrix, sys.rhs, &pc, cfg);
  out.x = sol.x;
  out.iterations = sol.iterations;
  out.converged = sol.converged;
  out.direct_diff = (sol.x - xd).norm() / std::max(xd.norm(), 1e-300);
  return out;
}
} // namespace
//-----------------------------------------------------------------------------
ExperimentReport run_traction(Family family, const std::vector<double>& gamma,
                              double alpha, const TractionOptions& opts)
{
  ExperimentReport rep;
  rep.id = "traction-" + family_name(family);
  describe_mesh(rep, opts.mesh);
  rep.metadata["solver"] = alpha > 0.0 && opts.iterative
                               ? "FGMRES + block AL, atol " + format_value(opts.atol, false)
                               : std::string(direct_solver_name());
  rep.add_column("gamma");
  rep.add_column("alpha");
  rep.add_column("level", true);
  rep.add_column("N", true);
  rep.add_column("dofs", true);
  rep.add_column("traction");
  rep.add_column("traction_eoc");
  rep.add_column("iterations", true);
  rep.add_column("direct_diff");
  const auto meshes = mesh_hierarchy(opts.mesh, opts.levels);
  for (double g : gamma)
  {
    const ProblemSpec spec = traction_problem(g, alpha);
    double prev = nan;
    for (int l = 0; l < opts.levels; ++l)
    {
      const auto S = build_global_space(meshes[l], family);
      const auto U = build_global_space(meshes[l], Family::DG1);
      const LinearSystem sys = assemble_hr_nitsche(*S, *U, spec);
      const NitscheSolve sol = solve_nitsche(sys, *S, *U, alpha, opts);
      const double t = traction_residual(*S, sol.x.head(S->num_dofs()),
                                         spec.neumann_tags, spec.traction);
      rep.add_row({g, alpha, double(l), double(1 << l), double(sys.size()), t,
                   l ? eoc(prev, t) : nan,
                   sol.converged ? double(sol.iterations) : nan, sol.direct_diff});
      prev = t;
    }
  }
  return rep;
}
//-----------------------------------------------------------------------------
ExperimentReport run_block_al_sweep(Family family, const std::vector<double>& alpha,
                                    double gamma, int level,
                                    const TractionOptions& opts, bool nitsche)
{
  ExperimentReport rep;
  rep.id = "block-al-" + family_name(family);
  rep.metadata["problem"] = nitsche ? "traction (Nitsche)" : "pure displacement, nu 0.25";
  if (nitsche)
    rep.metadata["gamma"] = format_value(gamma, false);
  describe_mesh(rep, opts.mesh);
  rep.metadata["level"] = std::to_string(level);
  rep.metadata["atol"] = format_value(opts.atol, false);
  rep.metadata["rtol"] = format_value(opts.rtol, false);
  rep.add_column("alpha");
  rep.add_column("dofs", true);
  rep.add_column("iterations", true);
  rep.add_column("converged", true);
  rep.add_column("direct_diff");
  const auto meshes = mesh_hierarchy(opts.mesh, level + 1);
  const auto S = build_global_space(meshes[level], family);
  const auto U = build_global_space(meshes[level], Family::DG1);
  for (double a : alpha)
  {
    ProblemSpec spec = traction_problem(gamma, a);
    if (!nitsche)
    {
      spec = hr_manufactured(family, 0.25);
      spec.alpha = a;
    }
    const LinearSystem sys = assemble_hr_nitsche(*S, *U, spec);
    TractionOptions o = opts;
    o.iterative = true;
    const NitscheSolve sol = solve_nitsche(sys, *S, *U, a, o);
    rep.add_row({a, double(sys.size()), double(sol.iterations),
                 sol.converged ? 1.0 : 0.0, sol.direct_diff});
  }
  return rep;
}
//-----------------------------------------------------------------------------
ExperimentReport run_conditioning(Family family, int refinements)
{
  ExperimentReport rep;
  rep.id = "conditioning-" + family_name(family);
  rep.metadata["base"] = "2x2 right";
  rep.add_column("level", true);
  rep.add_column("dofs", true);
  rep.add_column("cond_scaled");
  rep.add_column("growth_scaled");
  rep.add_column("cond_unscaled");
  rep.add_column("growth_unscaled");
  auto mesh = std::make_shared<const Mesh>(structured_rectangle(2, 2, Pattern::right));
  double prev_s = nan, prev_u = nan;
  for (int l = 0; l <= refinements; ++l)
  {
    if (l)
      mesh = std::make_shared<const Mesh>(refine_uniform(*mesh));
    const auto Vs = build_global_space(mesh, family, true);
    const auto Vu = build_global_space(mesh, family, false);
    const auto [smin, smax] = extreme_eigenvalues(assemble_mass(*Vs));
    const auto [umin, umax] = extreme_eigenvalues(assemble_mass(*Vu));
    const double cs = smax / smin, cu = umax / umin;
    rep.add_row({double(l), double(Vs->num_dofs()), cs, cs / prev_s, cu, cu / prev_u});
    prev_s = cs;
    prev_u = cu;
  }
  return rep;
}
//-----------------------------------------------------------------------------
void CheckResult::require(bool ok, const std::string& what)
{
  messages.push_back((ok ? "ok: " : "FAIL: ") + what);
  pass = pass && ok;
}
//-----------------------------------------------------------------------------
CheckResult check_verify(const ExperimentReport& r)
{
  CheckResult c;
  const double k = r.at(0, "kronecker"), s = r.at(0, "constraint");
  const double f = r.at(0, "feec"), j = r.at(0, "conformity");
  c.require(k <= 1e-9, "kronecker " + format_value(k, false) + " <= 1e-9");
  c.require(s <= 1e-9, "constraint " + format_value(s, false) + " <= 1e-9");
  c.require(f <= 1e-10, "feec " + format_value(f, false) + " <= 1e-10");
  if (!std::isnan(j))
    c.require(j <= 1e-9, "conformity " + format_value(j, false) + " <= 1e-9");
  return c;
}
//-----------------------------------------------------------------------------
namespace
{
std::vector<double> distinct(const ExperimentReport& r, const std::string& col)
{
  std::vector<double> v;
  const int c = r.column(col);
  for (const auto& row : r.rows)
    if (std::find(v.begin(), v.end(), row[c]) == v.end())
      v.push_back(row[c]);
  return v;
}

void check_eoc(CheckResult& c, const ExperimentReport& r, const std::string& param,
               double value, const std::string& col, double lo, double hi)
{
  const auto rows = r.select(param, value);
  const double e = r.at(rows.back(), col);
  c.require(e >= lo && e <= hi, param + "=" + format_value(value, false) + " " + col
                                    + " " + format_value(e, false) + " in ["
                                    + format_value(lo, false) + ", "
                                    + format_value(hi, false) + "]");
}

void check_spread(CheckResult& c, const ExperimentReport& r, const std::string& param,
                  const std::string& col, double limit, int last_levels = 0)
{
  const auto params = distinct(r, param);
  auto levels = distinct(r, "level");
  if (last_levels > 0 && static_cast<int>(levels.size()) > last_levels)
    levels.erase(levels.begin(), levels.end() - last_levels);
  for (double level : levels)
  {
    std::vector<double> v;
    for (double p : params)
      for (std::size_t row : r.select(param, p))
        if (r.at(row, "level") == level)
          v.push_back(r.at(row, col));
    const double s = spread(v);
    c.require(s <= limit, col + " spread over " + param + " at level "
                              + format_value(level, true) + ": "
                              + format_value(s, false) + " <= "
                              + format_value(limit, false) + " (" + join(v) + ")");
  }
}
} // namespace
//-----------------------------------------------------------------------------
CheckResult check_mtw(const ExperimentReport& r)
{
  CheckResult c;
  for (double e : distinct(r, "eps"))
  {
    check_eoc(c, r, "eps", e, "u_eoc", 1.85, 2.1);
    check_eoc(c, r, "eps", e, "p_eoc", 0.85, 1.1);
  }
  check_spread(c, r, "eps", "u_err", 0.35);
  check_spread(c, r, "eps", "p_err", 0.35);
  return c;
}
//-----------------------------------------------------------------------------
CheckResult check_hr(Family family, const ExperimentReport& r)
{
  CheckResult c;
  const double slo = family == Family::AWc ? 2.85 : 0.9;
  const double shi = family == Family::AWc ? 3.1 : 1.1;
  for (double v : distinct(r, "nu"))
  {
    check_eoc(c, r, "nu", v, "u_eoc", 1.9, 2.1);
    check_eoc(c, r, "nu", v, "sigma_eoc", slo, shi);
    check_eoc(c, r, "nu", v, "div_eoc", 1.9, 2.1);
  }
  if (family == Family::AWnc)
    for (const char* col : {"u_err", "sigma_err", "div_err"})
      check_spread(c, r, "nu", col, 0.25, 2);
  return c;
}
//-----------------------------------------------------------------------------
CheckResult check_beam(const ExperimentReport& r)
{
  CheckResult c;
  std::vector<double> it;
  for (std::size_t i = 0; i < r.rows.size(); ++i)
  {
    const double nu = r.at(i, "nu");
    c.require(r.at(i, "converged") == 1.0,
              "nu=" + format_value(nu, false) + " converged in "
                  + format_value(r.at(i, "iterations"), true) + " iterations");
    c.require(r.at(i, "direct_diff") <= 1e-4,
              "nu=" + format_value(nu, false) + " direct difference "
                  + format_value(r.at(i, "direct_diff"), false) + " <= 1e-4");
    c.require(r.at(i, "tip_deflection") < 0.0, "downward tip deflection");
    it.push_back(r.at(i, "iterations"));
  }
  const double s = spread(it);
  c.require(s <= 0.2, "iteration spread " + format_value(s, false) + " <= 0.2");
  // bounded as nu -> 1/2: all tip deflections within a factor of two
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < r.rows.size(); ++i)
  {
    lo = std::min(lo, std::abs(r.at(i, "tip_deflection")));
    hi = std::max(hi, std::abs(r.at(i, "tip_deflection")));
  }
  c.require(hi <= 2.0 * lo, "tip deflection bounded in nu");
  return c;
}
//-----------------------------------------------------------------------------
CheckResult check_traction(const ExperimentReport& r)
{
  CheckResult c;
  const auto gammas = distinct(r, "gamma");
  for (double g : gammas)
  {
    const auto rows = r.select("gamma", g);
    bool mono = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
      mono = mono && r.at(rows[i], "traction") < r.at(rows[i - 1], "traction");
    c.require(mono, "gamma=" + format_value(g, false) + " residual decreases with level");
    const double rate = eoc(r.at(rows.front(), "traction"), r.at(rows.back(), "traction"))
                        / double(rows.size() - 1);
    c.require(rate >= 0.5, "gamma=" + format_value(g, false) + " mean rate "
                               + format_value(rate, false) + " >= 0.5");
    for (std::size_t row : rows)
      if (!std::isnan(r.at(row, "direct_diff")))
        c.require(!std::isnan(r.at(row, "iterations")) && r.at(row, "direct_diff") <= 1e-6,
                  "gamma=" + format_value(g, false) + " level "
                      + format_value(r.at(row, "level"), true) + " iterative solve ("
                      + format_value(r.at(row, "iterations"), true) + " its)");
  }
  if (gammas.size() > 1)
    for (double level : distinct(r, "level"))
    {
      std::vector<std::pair<double, double>> v;
      for (std::size_t row : r.select("level", level))
        v.emplace_back(r.at(row, "gamma"), r.at(row, "traction"));
      std::sort(v.begin(), v.end());
      bool dec = true;
      for (std::size_t i = 1; i < v.size(); ++i)
        dec = dec && v[i].second < v[i - 1].second;
      c.require(dec, "level " + format_value(level, true)
                         + " residual decreases with gamma");
    }
  return c;
}
//-----------------------------------------------------------------------------
CheckResult check_block_al(const ExperimentReport& r)
{
  CheckResult c;
  for (std::size_t i = 0; i < r.rows.size(); ++i)
  {
    const std::string a = "alpha=" + format_value(r.at(i, "alpha"), false);
    c.require(r.at(i, "converged") == 1.0, a + " converged");
    c.require(r.at(i, "direct_diff") <= 1e-6, a + " matches the direct solve");
    if (i)
      c.require(r.at(i, "iterations") <= r.at(i - 1, "iterations"),
                a + " iterations non-increasing in alpha");
  }
  return c;
}
//-----------------------------------------------------------------------------
CheckResult check_conditioning(const ExperimentReport& r)
{
  CheckResult c;
  for (std::size_t i = 1; i < r.rows.size(); ++i)
  {
    const double gu = r.at(i, "growth_unscaled");
    const double gs = r.at(i, "growth_scaled");
    c.require(gu >= 8 && gu <= 32,
              "unscaled growth " + format_value(gu, false) + " in [8, 32]");
    c.require(gs <= 2, "scaled growth " + format_value(gs, false) + " <= 2");
  }
  return c;
}

} // namespace piolafe
