#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "piolafe/errors.hpp"
#include "piolafe/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

using namespace piolafe;
using doctest::Approx;

namespace
{
ExperimentReport sample()
{
  ExperimentReport r;
  r.id = "sample";
  r.metadata["base"] = "4";
  r.add_column("level", true);
  r.add_column("err");
  r.add_column("eoc");
  r.add_row({0, 1.0 / 3.0, std::nan("")});
  r.add_row({1, 1.0 / 12.0, eoc(1.0 / 3.0, 1.0 / 12.0)});
  return r;
}

std::vector<std::vector<std::string>> table_cells(const std::string& text, char sep,
                                                  bool markdown)
{
  std::vector<std::vector<std::string>> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
  {
    if (line.empty() || line[0] == '#' || line[0] == '-' || line.rfind("---", 1) == 1)
      continue;
    if (markdown && line[0] != '|')
      continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream l(markdown ? line.substr(1) : line);
    while (std::getline(l, cell, sep))
    {
      const auto a = cell.find_first_not_of(' '), b = cell.find_last_not_of(' ');
      cells.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
    }
    if (!markdown && !line.empty() && line.back() == sep)
      cells.push_back("");
    out.push_back(cells);
  }
  return out;
}

// synthetic Stokes-Darcy style report with chosen rates
ExperimentReport synthetic_mtw(double u_rate, double p_rate, double offset)
{
  ExperimentReport r;
  for (const char* c : {"eps", "level", "N", "dofs", "u_err", "u_eoc", "p_err", "p_eoc"})
    r.add_column(c);
  for (double e : {1.0, 0.0})
    for (int l = 0; l < 4; ++l)
    {
      const double scale = e == 0.0 ? offset : 1.0;
      const double u = scale * std::pow(2.0, -u_rate * l);
      const double p = scale * std::pow(2.0, -p_rate * l);
      r.add_row({e, double(l), std::pow(2.0, l), 100.0 * (l + 1), u, l ? u_rate : NAN, p,
                 l ? p_rate : NAN});
    }
  return r;
}
} // namespace

TEST_CASE("EOC is the log2 ratio")
{
  CHECK(eoc(1.0, 0.25) == Approx(2.0));
  CHECK(eoc(3.30e-5, 8.32e-6) == Approx(1.9878).epsilon(1e-4));
  CHECK(eoc(1.0, 1.0) == 0.0);
}

TEST_CASE("report access")
{
  const ExperimentReport r = sample();
  CHECK(r.column("err") == 1);
  CHECK_THROWS(r.column("missing"));
  CHECK(r.at(1, "eoc") == Approx(2.0));
  CHECK(r.select("level", 1).size() == 1);
  ExperimentReport bad = sample();
  CHECK_THROWS(bad.add_row({1.0}));
}

TEST_CASE("CSV and markdown carry the same table")
{
  const ExperimentReport r = sample();
  std::ostringstream csv, md;
  r.write_csv(csv);
  r.write_markdown(md);
  CHECK(csv.str().find("# experiment=sample") != std::string::npos);
  CHECK(csv.str().find("# base=4") != std::string::npos);
  CHECK(md.str().find("- base: 4") != std::string::npos);
  const auto c = table_cells(csv.str(), ',', false);
  const auto m = table_cells(md.str(), '|', true);
  REQUIRE(c.size() == 3);
  REQUIRE(m.size() == 3);
  for (std::size_t j = 0; j < 3; ++j)
    CHECK(c[0][j] == m[0][j]);
  for (std::size_t i = 1; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
    {
      if (c[i][j].empty())
      {
        CHECK(m[i][j].empty());
        continue;
      }
      const double a = std::stod(c[i][j]), b = std::stod(m[i][j]);
      // markdown keeps three significant digits
      CHECK(b == Approx(a).epsilon(5e-3));
    }
  // CSV is full precision
  CHECK(std::stod(c[1][1]) == 1.0 / 3.0);
  CHECK(c[1][0] == "0");
}

TEST_CASE("CSV file output")
{
  const std::string path = "harness_sample.csv";
  sample().save_csv(path);
  std::ifstream f(path);
  std::stringstream s;
  s << f.rdbuf();
  CHECK(s.str().find("level,err,eoc") != std::string::npos);
  std::remove(path.c_str());
  CHECK_THROWS(sample().save_csv("/nonexistent-dir/x.csv"));
}

TEST_CASE("mesh hierarchy")
{
  const auto h = mesh_hierarchy(MeshOptions{}, 3);
  REQUIRE(h.size() == 3);
  CHECK(h[0]->num_cells() == 32);
  CHECK(h[1]->num_cells() == 128);
  CHECK(h[2]->num_cells() == 512);
  const auto g = mesh_hierarchy(MeshOptions{}, 1);
  for (int v = 0; v < h[0]->num_vertices(); ++v)
    CHECK(g[0]->vertices()[v] == h[0]->vertices()[v]);
}

TEST_CASE("element verification residuals")
{
  CHECK(kronecker_residual(Family::AWc, reference_triangle()) < 1e-12);
  const VerifyResult m = verify_element(Family::MTW, 100, 1);
  CHECK(m.kronecker <= 1e-9);
  CHECK(m.constraint <= 1e-9);
  CHECK(m.conformity <= 1e-9);
  const VerifyResult n = verify_element(Family::AWnc, 100, 1);
  CHECK(n.constraint <= 1e-9);
  CHECK(std::isnan(n.conformity));
  CHECK(check_verify(run_verify(Family::AWc, 20, 3)).pass);
}

TEST_CASE("constraint residuals on a random cell")
{
  std::mt19937_64 rng(12);
  const Triangle t = random_triangle(rng);
  CHECK(constraint_residual(Family::MTW, t) < 1e-9);
  CHECK(constraint_residual(Family::AWc, t) < 1e-9);
  CHECK(constraint_residual(Family::AWnc, t) < 1e-9);
}

TEST_CASE("threshold checks accept and reject")
{
  CHECK(check_mtw(synthetic_mtw(2.0, 1.0, 1.1)).pass);
  CHECK_FALSE(check_mtw(synthetic_mtw(1.5, 1.0, 1.1)).pass);
  CHECK_FALSE(check_mtw(synthetic_mtw(2.0, 1.3, 1.1)).pass);
  // errors across eps must stay within 35%
  CHECK_FALSE(check_mtw(synthetic_mtw(2.0, 1.0, 2.0)).pass);
  ExperimentReport cond;
  for (const char* c : {"level", "dofs", "cond_scaled", "growth_scaled", "cond_unscaled",
                        "growth_unscaled"})
    cond.add_column(c);
  cond.add_row({0, 10, 5, NAN, 100, NAN});
  cond.add_row({1, 40, 6, 1.2, 1600, 16});
  CHECK(check_conditioning(cond).pass);
  cond.add_row({2, 160, 20, 3.3, 25600, 16});
  CHECK_FALSE(check_conditioning(cond).pass);
}

TEST_CASE("traction study converges with the block preconditioner")
{
  TractionOptions o;
  o.levels = 4;
  const ExperimentReport r = run_traction(Family::AWc, {100.0}, 1.0, o);
  for (std::size_t i = 1; i < r.rows.size(); ++i)
  {
    CHECK(r.at(i, "iterations") <= 200);
    CHECK(r.at(i, "direct_diff") <= 1e-6);
  }
  CHECK(check_traction(r).pass);
  o.iterative = false;
  o.levels = 3;
  const ExperimentReport n = run_traction(Family::AWnc, {100.0}, 0.0, o);
  CHECK(n.at(2, "traction") < n.at(0, "traction"));
}

TEST_CASE("conditioning study")
{
  const ExperimentReport r = run_conditioning(Family::AWc, 2);
  CHECK(r.rows.size() == 3);
  CHECK(check_conditioning(r).pass);
}
