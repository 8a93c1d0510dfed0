#include "shapecalc/cli.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace shapecalc;

namespace {

// One configured problem with its base state, kept alive between calls.
class Problem {
 public:
  Problem(const cli::ExperimentConfig& cfg, int level)
      : cfg_(cfg), setup_(cli::build_setup(cfg, level < 0 ? cfg.level : level)), lin_(setup_.flow_case) {}

  Eigen::VectorXd S() const { return lin_.base().S.values; }

  Eigen::VectorXd dS(const std::string& field) const {
    return lin_.apply(geometry::DeformationField(cli::parse_wall_function(setup_.domain, field))).values;
  }

  py::dict identity(const std::string& field, const std::string& multiplier, bool flip_kappa) const {
    const geometry::DeformationField V(cli::parse_wall_function(setup_.domain, field));
    const auto mu = cli::parse_wall_function(setup_.domain, multiplier);
    const auto r = adjoint::identity_check(lin_, V, mu, {flip_kappa});
    py::dict d;
    d["lhs"] = r.lhs;
    d["rhs"] = r.rhs;
    d["scale"] = r.scale;
    d["residual"] = r.residual;
    return d;
  }

  py::dict wall() const {
    const auto& pts = setup_.quad->points;
    const auto n = static_cast<Eigen::Index>(pts.size());
    Eigen::VectorXi loop(n);
    Eigen::VectorXd s(n), w(n), kappa(n);
    Eigen::MatrixX2d x(n, 2), normal(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& p = pts[static_cast<std::size_t>(i)];
      loop[i] = p.loop;
      s[i] = p.s;
      w[i] = p.weight;
      kappa[i] = p.kappa;
      x.row(i) = p.x.transpose();
      normal.row(i) = p.n.transpose();
    }
    py::dict d;
    d["loop"] = loop;
    d["s"] = s;
    d["weight"] = w;
    d["kappa"] = kappa;
    d["x"] = x;
    d["normal"] = normal;
    return d;
  }

  int num_vertices() const { return setup_.mesh->num_vertices; }
  int num_triangles() const { return setup_.mesh->num_triangles(); }

 private:
  cli::ExperimentConfig cfg_;
  cli::Setup setup_;
  ops::Linearization lin_;
};

cli::ExperimentConfig parse_text(const std::string& text) {
  std::istringstream in(text);
  return cli::parse_config(in);
}

py::list verify(const cli::ExperimentConfig& cfg) {
  cli::VerifyReport rep;
  {
    py::gil_scoped_release release;
    rep = cli::run_verify(cfg);
  }
  py::list out;
  for (const auto& c : rep.checks) {
    py::dict d;
    d["name"] = c.name;
    d["value"] = c.value;
    d["relation"] = c.relation;
    d["threshold"] = c.threshold;
    d["passed"] = c.passed;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_shapecalc, m) {
  m.doc() = "2D shape calculus toolkit: flow operators, shape derivatives, adjoint checks.";

  py::register_exception<cli::ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<cli::ExperimentConfig>(m, "Config")
      .def(py::init<>())
      .def_readwrite("domain_type", &cli::ExperimentConfig::domain_type)
      .def_readwrite("inner_radius", &cli::ExperimentConfig::inner_radius)
      .def_readwrite("outer_radius", &cli::ExperimentConfig::outer_radius)
      .def_readwrite("data", &cli::ExperimentConfig::data)
      .def_readwrite("flow", &cli::ExperimentConfig::flow)
      .def_readwrite("degree", &cli::ExperimentConfig::degree)
      .def_readwrite("h0", &cli::ExperimentConfig::h0)
      .def_readwrite("level", &cli::ExperimentConfig::level)
      .def_readwrite("fields", &cli::ExperimentConfig::fields)
      .def_readwrite("multipliers", &cli::ExperimentConfig::multipliers)
      .def_readwrite("t_list", &cli::ExperimentConfig::t_list)
      .def_readwrite("threads", &cli::ExperimentConfig::threads)
      .def_readwrite("seed", &cli::ExperimentConfig::seed)
      .def("validate", [](const cli::ExperimentConfig& c) { cli::validate(c); });

  m.def("load_config", [](const std::filesystem::path& p) { return cli::load_config(p); }, py::arg("path"));
  m.def("parse_config", &parse_text, py::arg("text"));
  m.def("config_reference", &cli::config_reference);

  py::class_<Problem>(m, "Problem")
      .def(py::init<const cli::ExperimentConfig&, int>(), py::arg("config"), py::arg("level") = -1)
      .def("S", &Problem::S, "S on the wall quadrature points")
      .def("dS", &Problem::dS, py::arg("field"), "dS for a normal speed spec such as 'uniform 0'")
      .def("identity", &Problem::identity, py::arg("field"), py::arg("multiplier"), py::arg("flip_kappa") = false)
      .def("wall", &Problem::wall)
      .def_property_readonly("num_vertices", &Problem::num_vertices)
      .def_property_readonly("num_triangles", &Problem::num_triangles);

  m.def(
      "radial_oracles",
      [](const std::string& kind, double r1, double r2, double g1, double g2) {
        const auto r = validation::radial_oracles(ops::parse_flow_kind(kind), r1, r2, g1, g2);
        py::dict d;
        d["S"] = r.S;
        d["dS"] = r.dS;
        d["z"] = r.z;
        d["dn_omega"] = r.dn_omega;
        return d;
      },
      py::arg("kind"), py::arg("r1"), py::arg("r2"), py::arg("g1"), py::arg("g2"));

  m.def("verify", &verify, py::arg("config"));
}
