#include "piolafe/errors.hpp"
#include "piolafe/harness.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace piolafe;

namespace
{
std::shared_ptr<const Mesh> as_shared(const Mesh& m) { return std::make_shared<const Mesh>(m); }

std::vector<Point> to_points(const Eigen::MatrixXd& x)
{
  if (x.cols() != 2)
    throw std::invalid_argument("points must have shape (n, 2)");
  std::vector<Point> p;
  for (int i = 0; i < x.rows(); ++i)
    p.emplace_back(x(i, 0), x(i, 1));
  return p;
}

py::array_t<double> tabulation_array(const Tabulation& t)
{
  py::array_t<double> a({t.num_functions(), t.num_points(), t.value_size()});
  auto r = a.mutable_unchecked<3>();
  for (int f = 0; f < t.num_functions(); ++f)
    for (int p = 0; p < t.num_points(); ++p)
      for (int c = 0; c < t.value_size(); ++c)
        r(f, p, c) = t.value(f, p, c);
  return a;
}
} // namespace

PYBIND11_MODULE(_piolafe, m)
{
  m.doc() = "Triangular finite elements with transformation-corrected bases";

  py::register_exception<Error>(m, "PiolafeError", PyExc_RuntimeError);

  py::enum_<Family>(m, "Family")
      .value("BDM1", Family::BDM1)
      .value("MTW", Family::MTW)
      .value("AWc", Family::AWc)
      .value("AWnc", Family::AWnc)
      .value("DG0", Family::DG0)
      .value("DG1", Family::DG1);
  m.def("family_from_name", &family_from_name);

  py::enum_<Pattern>(m, "Pattern").value("right", Pattern::right).value("crossed", Pattern::crossed);

  py::class_<Mesh>(m, "Mesh")
      .def_property_readonly("num_vertices", &Mesh::num_vertices)
      .def_property_readonly("num_cells", &Mesh::num_cells)
      .def_property_readonly("num_edges", &Mesh::num_edges)
      .def_property_readonly("vertices",
                             [](const Mesh& x)
                             {
                               Eigen::MatrixX2d v(x.num_vertices(), 2);
                               for (int i = 0; i < x.num_vertices(); ++i)
                                 v.row(i) = x.vertices()[i].transpose();
                               return v;
                             })
      .def_property_readonly("cells",
                             [](const Mesh& x)
                             {
                               Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor> c(
                                   x.num_cells(), 3);
                               for (int i = 0; i < x.num_cells(); ++i)
                                 for (int k = 0; k < 3; ++k)
                                   c(i, k) = x.cells()[i][k];
                               return c;
                             })
      .def("save", [](const Mesh& x, const std::string& path) { save_mesh(x, path); })
      .def("to_text",
           [](const Mesh& x)
           {
             std::ostringstream s;
             write_mesh(x, s);
             return s.str();
           });
  m.def("structured_rectangle", &structured_rectangle, py::arg("nx"), py::arg("ny"),
        py::arg("pattern") = Pattern::right, py::arg("lx") = 1.0, py::arg("ly") = 1.0);
  m.def("perturb_interior", &perturb_interior, py::arg("mesh"), py::arg("amplitude"),
        py::arg("seed") = 1);
  m.def("refine_uniform", &refine_uniform);
  m.def("load_mesh", &load_mesh);
  m.def("mesh_from_text",
        [](const std::string& text)
        {
          std::istringstream s(text);
          return read_mesh(s);
        });

  m.def(
      "tabulate",
      [](Family f, const Eigen::MatrixXd& points)
      { return tabulation_array(tabulate(*reference_element(f), to_points(points), 0)); },
      py::arg("family"), py::arg("points"),
      "Reference basis values, shape (functions, points, components).");
  m.def(
      "element_dim", [](Family f) { return reference_element(f)->dim(); }, py::arg("family"));
  m.def(
      "transform_matrix",
      [](Family f, const Eigen::Matrix<double, 3, 2, Eigen::RowMajor>& vertices)
      {
        Triangle t{{vertices.row(0).transpose(), vertices.row(1).transpose(),
                    vertices.row(2).transpose()}};
        return transform_matrix(f, affine_map(t)).dense();
      },
      py::arg("family"), py::arg("vertices"));

  m.def(
      "num_dofs",
      [](const Mesh& mesh, Family f, bool scaled)
      { return build_global_space(as_shared(mesh), f, scaled)->num_dofs(); },
      py::arg("mesh"), py::arg("family"), py::arg("scaled") = true);
  m.def(
      "mass_matrix",
      [](const Mesh& mesh, Family f, bool scaled)
      { return assemble_mass(*build_global_space(as_shared(mesh), f, scaled)); },
      py::arg("mesh"), py::arg("family"), py::arg("scaled") = true,
      "Global mass matrix as a scipy.sparse matrix.");

  py::class_<VerifyResult>(m, "VerifyResult")
      .def_readonly("kronecker", &VerifyResult::kronecker)
      .def_readonly("constraint", &VerifyResult::constraint)
      .def_readonly("feec", &VerifyResult::feec)
      .def_readonly("conformity", &VerifyResult::conformity);
  m.def("verify_element", &verify_element, py::arg("family"), py::arg("cells") = 100,
        py::arg("seed") = 1);

  py::class_<ExperimentReport>(m, "ExperimentReport")
      .def_readonly("id", &ExperimentReport::id)
      .def_readonly("metadata", &ExperimentReport::metadata)
      .def_readonly("columns", &ExperimentReport::columns)
      .def_readonly("rows", &ExperimentReport::rows)
      .def("column", [](const ExperimentReport& r, const std::string& name)
           {
             std::vector<double> v;
             const int c = r.column(name);
             for (const auto& row : r.rows)
               v.push_back(row[c]);
             return v;
           })
      .def("to_csv",
           [](const ExperimentReport& r)
           {
             std::ostringstream s;
             r.write_csv(s);
             return s.str();
           })
      .def("to_markdown",
           [](const ExperimentReport& r)
           {
             std::ostringstream s;
             r.write_markdown(s);
             return s.str();
           })
      .def("save_csv", &ExperimentReport::save_csv);

  py::class_<MeshOptions>(m, "MeshOptions")
      .def(py::init<>())
      .def_readwrite("base", &MeshOptions::base)
      .def_readwrite("pattern", &MeshOptions::pattern)
      .def_readwrite("warp", &MeshOptions::warp)
      .def_readwrite("seed", &MeshOptions::seed)
      .def_readwrite("path", &MeshOptions::path);

  py::class_<BeamOptions>(m, "BeamOptions")
      .def(py::init<>())
      .def_readwrite("nx", &BeamOptions::nx)
      .def_readwrite("ny", &BeamOptions::ny)
      .def_readwrite("refine", &BeamOptions::refine)
      .def_readwrite("pattern", &BeamOptions::pattern)
      .def_readwrite("coarse_space", &BeamOptions::coarse_space)
      .def_readwrite("rtol", &BeamOptions::rtol);

  py::class_<TractionOptions>(m, "TractionOptions")
      .def(py::init<>())
      .def_readwrite("levels", &TractionOptions::levels)
      .def_readwrite("mesh", &TractionOptions::mesh)
      .def_readwrite("iterative", &TractionOptions::iterative)
      .def_readwrite("atol", &TractionOptions::atol)
      .def_readwrite("rtol", &TractionOptions::rtol)
      .def_readwrite("max_iterations", &TractionOptions::max_iterations)
      .def_readwrite("chebyshev_sweeps", &TractionOptions::chebyshev_sweeps)
      .def_readwrite("coarse_space", &TractionOptions::coarse_space);

  py::class_<CheckResult>(m, "CheckResult")
      .def_readonly("passed", &CheckResult::pass)
      .def_readonly("messages", &CheckResult::messages)
      .def("__bool__", [](const CheckResult& c) { return c.pass; });

  m.def("run_verify", &run_verify, py::arg("family"), py::arg("cells") = 100,
        py::arg("seed") = 1);
  m.def("run_mtw_convergence", &run_mtw_convergence, py::arg("eps"), py::arg("levels"),
        py::arg("mesh") = MeshOptions{});
  m.def("run_hr_convergence", &run_hr_convergence, py::arg("family"), py::arg("nu"),
        py::arg("levels"), py::arg("mesh") = MeshOptions{});
  m.def("run_beam", &run_beam, py::arg("nu"), py::arg("options") = BeamOptions{});
  m.def("run_traction", &run_traction, py::arg("family"), py::arg("gamma"), py::arg("alpha"),
        py::arg("options") = TractionOptions{});
  m.def("run_block_al_sweep", &run_block_al_sweep, py::arg("family"), py::arg("alpha"),
        py::arg("gamma"), py::arg("level"), py::arg("options") = TractionOptions{},
        py::arg("nitsche") = false);
  m.def("run_conditioning", &run_conditioning, py::arg("family"), py::arg("refinements") = 3);

  m.def("check_verify", &check_verify);
  m.def("check_mtw", &check_mtw);
  m.def("check_hr", &check_hr);
  m.def("check_beam", &check_beam);
  m.def("check_traction", &check_traction);
  m.def("check_block_al", &check_block_al);
  m.def("check_conditioning", &check_conditioning);
  m.def("eoc", &eoc);
}
