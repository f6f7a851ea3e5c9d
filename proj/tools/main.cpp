#include "piolafe/errors.hpp"
#include "piolafe/harness.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>

using namespace piolafe;

namespace
{
struct Common
{
  std::string out;
  bool check = false;
};

void add_common(CLI::App* app, Common& c)
{
  app->add_option("--out", c.out, "write the report as CSV");
  app->add_flag("--check", c.check, "exit nonzero when a threshold fails");
}

void add_mesh(CLI::App* app, MeshOptions& m, std::string& pattern)
{
  app->add_option("--seed", m.seed, "mesh perturbation seed");
  app->add_option("--base", m.base, "squares per side of the base mesh");
  app->add_option("--pattern", pattern, "right|crossed")
      ->check(CLI::IsMember({"right", "crossed"}));
  app->add_option("--warp", m.warp, "interior vertex perturbation in [0, 0.4)");
  app->add_option("--mesh-in", m.path, "base mesh file (replaces the generated mesh)");
}

int finish(const ExperimentReport& r, const Common& c,
           CheckResult (*check)(const ExperimentReport&))
{
  r.write_markdown(std::cout);
  if (!c.out.empty())
    r.save_csv(c.out);
  if (!c.check || !check)
    return 0;
  const CheckResult res = check(r);
  for (const auto& m : res.messages)
    std::cout << m << "\n";
  return res.pass ? 0 : 1;
}
} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Finite elements with non-Piola transformations"};
  app.require_subcommand(1);

  Common common;
  MeshOptions mesh;
  std::string pattern = "right";
  std::string family = "mtw";
  std::uint64_t seed = 1;
  int cells = 100;
  int levels = 5;
  std::vector<double> eps{1.0, 0.25, 0.0625, 0.015625, 0.00390625, 0.0009765625, 0.0};
  std::vector<double> nu;
  BeamOptions beam;
  std::vector<double> gamma{100.0};
  double alpha = 1.0;
  TractionOptions traction;
  bool direct = false;
  int refinements = 3;
  int level = 0;
  std::string mesh_out;
  int nx = 4, ny = 4, refine = 0;

  auto* verify = app.add_subcommand("verify-element", "element correctness checks");
  verify->add_option("--family", family)->required()->check(
      CLI::IsMember({"mtw", "awc", "awnc", "bdm1"}));
  verify->add_option("--cells", cells, "random cells");
  verify->add_option("--seed", seed);
  add_common(verify, common);

  auto* conv = app.add_subcommand("convergence", "manufactured solution study");
  conv->add_option("--problem", family)->required()->check(
      CLI::IsMember({"mtw", "awc", "awnc"}));
  conv->add_option("--levels", levels, "refinement levels, N = 1 .. 2^(L-1)");
  auto* eps_opt = conv->add_option("--eps", eps, "MTW parameter list");
  auto* nu_opt = conv->add_option("--nu", nu, "Poisson ratio list");
  eps_opt->excludes(nu_opt);
  add_mesh(conv, mesh, pattern);
  conv->add_option("--mesh-out", mesh_out, "write the base mesh");
  add_common(conv, common);

  auto* bm = app.add_subcommand("beam", "cantilever robustness sweep");
  bm->add_option("--nu", nu);
  bm->add_option("--nx", beam.nx);
  bm->add_option("--ny", beam.ny);
  bm->add_option("--refine", beam.refine, "uniform refinements");
  bm->add_option("--pattern", pattern)->check(CLI::IsMember({"right", "crossed"}));
  bool one_level = false;
  bm->add_flag("--one-level", one_level, "drop the P1 coarse space");
  bm->add_option("--rtol", beam.rtol);
  add_common(bm, common);

  auto* tr = app.add_subcommand("traction", "Nitsche traction convergence");
  tr->add_option("--element", family)->required()->check(
      CLI::IsMember({"awc", "awnc"}));
  tr->add_option("--gamma", gamma);
  tr->add_option("--alpha", alpha);
  tr->add_option("--levels", traction.levels);
  tr->add_option("--sweeps", traction.chebyshev_sweeps, "Chebyshev sweeps on the ASM");
  tr->add_flag("--direct", direct, "direct solves only");
  add_mesh(tr, mesh, pattern);
  add_common(tr, common);

  auto* al = app.add_subcommand("block-al", "outer iterations against alpha");
  TractionOptions al_opts;
  al_opts.rtol = 1e-12;
  al_opts.atol = 0.0;
  std::vector<double> alphas{1.0, 10.0, 100.0};
  double al_gamma = 100.0;
  al->add_option("--element", family)->check(CLI::IsMember({"awc", "awnc"}));
  al->add_option("--alpha", alphas);
  al->add_option("--gamma", al_gamma);
  al->add_option("--level", level);
  al->add_option("--rtol", al_opts.rtol, "relative tolerance (0: absolute atol only)");
  al->add_option("--atol", al_opts.atol);
  al->add_option("--sweeps", al_opts.chebyshev_sweeps);
  bool al_one_level = false;
  bool al_nitsche = false;
  al->add_flag("--nitsche", al_nitsche, "traction problem instead of pure displacement");
  al->add_flag("--one-level", al_one_level, "drop the P1 coarse space");
  add_mesh(al, mesh, pattern);
  add_common(al, common);

  auto* cond = app.add_subcommand("conditioning", "mass matrix condition numbers");
  cond->add_option("--family", family)->check(
      CLI::IsMember({"mtw", "awc", "awnc", "bdm1"}));
  cond->add_option("--refinements", refinements);
  add_common(cond, common);

  auto* ms = app.add_subcommand("mesh", "generate and export a mesh");
  ms->add_option("--nx", nx);
  ms->add_option("--ny", ny);
  ms->add_option("--refine", refine);
  ms->add_option("--pattern", pattern)->check(CLI::IsMember({"right", "crossed"}));
  ms->add_option("--warp", mesh.warp);
  ms->add_option("--seed", mesh.seed);
  ms->add_option("--out", mesh_out)->required();

  CLI11_PARSE(app, argc, argv);

  try
  {
    mesh.pattern = pattern_from_name(pattern);
    if (*verify)
    {
      return finish(run_verify(family_from_name(family), cells, seed), common,
                    check_verify);
    }
    if (*conv)
    {
      if (!mesh_out.empty())
        save_mesh(*mesh_hierarchy(mesh, 1)[0], mesh_out);
      if (family == "mtw")
        return finish(run_mtw_convergence(eps, levels, mesh), common, check_mtw);
      if (nu.empty())
        nu = {0.25, 0.4999999};
      const Family f = family_from_name(family);
      const ExperimentReport r = run_hr_convergence(f, nu, levels, mesh);
      return finish(r, common,
                    f == Family::AWc ? +[](const ExperimentReport& x)
                    { return check_hr(Family::AWc, x); }
                                     : +[](const ExperimentReport& x)
                    { return check_hr(Family::AWnc, x); });
    }
    if (*bm)
    {
      if (nu.empty())
        nu = {0.3, 0.45, 0.49, 0.4999, 0.4999999};
      beam.coarse_space = !one_level;
      if (bm->count("--pattern"))
        beam.pattern = pattern_from_name(pattern);
      return finish(run_beam(nu, beam), common, check_beam);
    }
    if (*tr)
    {
      traction.mesh = mesh;
      traction.iterative = !direct;
      return finish(run_traction(family_from_name(family), gamma, alpha, traction),
                    common, check_traction);
    }
    if (*al)
    {
      al_opts.mesh = mesh;
      al_opts.coarse_space = !al_one_level;
      return finish(run_block_al_sweep(family_from_name(family == "mtw" ? "awc" : family),
                                       alphas, al_gamma, level, al_opts, al_nitsche),
                    common, check_block_al);
    }
    if (*cond)
    {
      const Family f = family_from_name(family == "mtw" && !cond->count("--family")
                                            ? "awc"
                                            : family);
      return finish(run_conditioning(f, refinements), common, check_conditioning);
    }
    if (*ms)
    {
      Mesh m = structured_rectangle(nx, ny, mesh.pattern);
      if (mesh.warp > 0)
        m = perturb_interior(m, mesh.warp, mesh.seed);
      for (int r = 0; r < refine; ++r)
        m = refine_uniform(m);
      save_mesh(m, mesh_out);
      std::cout << "vertices " << m.num_vertices() << " cells " << m.num_cells() << "\n";
      return 0;
    }
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
