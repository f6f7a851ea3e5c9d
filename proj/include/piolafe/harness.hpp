#pragma once

#include "piolafe/assembly.hpp"
#include "piolafe/elements.hpp"
#include "piolafe/mesh.hpp"
#include "piolafe/solvers.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace piolafe
{

/// A table of numeric results. Integer columns print without exponent,
/// everything else in 3-significant-digit scientific notation.
struct ExperimentReport
{
  std::string id;
  std::map<std::string, std::string> metadata;
  std::vector<std::string> columns;
  std::vector<bool> integer_column;
  std::vector<std::vector<double>> rows;

  void add_column(const std::string& name, bool integer = false);
  int column(const std::string& name) const;
  void add_row(const std::vector<double>& values);
  double at(std::size_t row, const std::string& name) const;
  /// Row indices whose column `name` equals `value`.
  std::vector<std::size_t> select(const std::string& name, double value) const;

  /// Full precision CSV.
  void write_csv(std::ostream& out) const;
  void save_csv(const std::string& path) const;
  void write_markdown(std::ostream& out) const;
};

/// log2(previous / current)
double eoc(double previous, double current);

struct MeshOptions
{
  int base = 4;
  Pattern pattern = Pattern::right;
  double warp = 0.2;
  std::uint64_t seed = 1;
  /// base mesh file; replaces the structured base mesh (no warp applied)
  std::string path;
};

/// Warped unit-square base mesh refined uniformly; entry l has N = 2^l.
std::vector<std::shared_ptr<const Mesh>> mesh_hierarchy(const MeshOptions& opts,
                                                        int levels);

/// Kronecker, constraint-preservation and FEEC residuals on random cells.
struct VerifyResult
{
  double kronecker = 0.0;
  double constraint = 0.0;
  double feec = 0.0;
  double conformity = 0.0;
};

/// Physical DOF functionals applied to the mapped basis, minus identity, on
/// one cell.
double kronecker_residual(Family family, const Triangle& cell);
/// Relative deviation of the mapped basis from the constrained space.
double constraint_residual(Family family, const Triangle& cell);
/// Largest relative jump of the normal (traction) trace over interior edges
/// for random global coefficient vectors.
double conformity_residual(const GlobalSpace& V, int samples, std::uint64_t seed);

/// Seeded random triangle in [-2, 2]^2 with bounded shape quality.
Triangle random_triangle(std::mt19937_64& rng);

VerifyResult verify_element(Family family, int cells, std::uint64_t seed);
ExperimentReport run_verify(Family family, int cells, std::uint64_t seed);

/// Stokes-Darcy errors with direct solves; columns eps, level, N, dofs,
/// u_err, u_eoc, p_err, p_eoc.
ExperimentReport run_mtw_convergence(const std::vector<double>& eps, int levels,
                                     const MeshOptions& mesh);

/// Pure displacement Hellinger-Reissner errors; columns nu, level, N, dofs,
/// u_err, u_eoc, sigma_err, sigma_eoc, div_err, div_eoc.
ExperimentReport run_hr_convergence(Family family, const std::vector<double>& nu,
                                    int levels, const MeshOptions& mesh);

struct BeamOptions
{
  int nx = 25;
  int ny = 1;
  /// uniform refinements of the nx x ny mesh
  int refine = 2;
  Pattern pattern = Pattern::crossed;
  /// two-level ASM with a P1 coarse space
  bool coarse_space = true;
  double rtol = 1e-5;
};

/// Cantilever with star ASM preconditioned FGMRES; columns nu, dofs, iterations,
/// converged, tip_deflection, direct_diff.
ExperimentReport run_beam(const std::vector<double>& nu, const BeamOptions& opts);

struct TractionOptions
{
  int levels = 4;
  MeshOptions mesh{4, Pattern::right, 0.2, 1};
  /// block preconditioned FGMRES when alpha > 0, else direct
  bool iterative = true;
  double atol = 1e-9;
  /// relative tolerance; 0 means absolute only
  double rtol = 0.0;
  int max_iterations = 200;
  int chebyshev_sweeps = 4;
  /// two-level ASM with a P1 coarse space
  bool coarse_space = true;
};

/// Traction residual on the Nitsche boundary; columns gamma, alpha, level, N,
/// dofs, traction, traction_eoc, iterations, direct_diff.
ExperimentReport run_traction(Family family, const std::vector<double>& gamma,
                              double alpha, const TractionOptions& opts);

/// Outer iterations of the block preconditioned solve for each alpha on one
/// mesh; columns alpha, dofs, iterations, converged, direct_diff. The default
/// problem is the pure displacement one; `nitsche` selects the traction
/// problem with penalty gamma.
ExperimentReport run_block_al_sweep(Family family, const std::vector<double>& alpha,
                                    double gamma, int level,
                                    const TractionOptions& opts, bool nitsche = false);


/// AW^c mass matrix conditioning on a 2x2 mesh and its refinements; columns
/// level, dofs, cond_scaled, growth_scaled, cond_unscaled, growth_unscaled.
ExperimentReport run_conditioning(Family family, int refinements);

/// Threshold checks shared by the CLI --check mode and the acceptance tests.
struct CheckResult
{
  bool pass = true;
  std::vector<std::string> messages;
  void require(bool ok, const std::string& what);
};

CheckResult check_verify(const ExperimentReport& r);
CheckResult check_mtw(const ExperimentReport& r);
CheckResult check_hr(Family family, const ExperimentReport& r);
CheckResult check_beam(const ExperimentReport& r);
CheckResult check_traction(const ExperimentReport& r);
CheckResult check_block_al(const ExperimentReport& r);
CheckResult check_conditioning(const ExperimentReport& r);

} // namespace piolafe
