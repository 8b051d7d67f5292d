#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "constikit/bridge.hpp"
#include "constikit/errors.hpp"
#include "constikit/fe/case_io.hpp"
#include "constikit/fe/norms.hpp"
#include "constikit/fe/results.hpp"
#include "constikit/hydrogen.hpp"
#include "constikit/plugin.hpp"
#include "constikit/registry.hpp"
#include "constikit/tangent_check.hpp"

namespace py = pybind11;
using namespace constikit;

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;

// Shared handle so that built-ins and plugins look the same from Python.
struct Material {
  std::shared_ptr<const UmatMaterial> impl;
  const MaterialInfo& info() const { return impl->info(); }
};

Material builtin(const std::string& name) {
  return {std::shared_ptr<const UmatMaterial>(&builtin_material(name), [](const UmatMaterial*) {})};
}

py::dict info_dict(const MaterialInfo& i) {
  py::dict d;
  d["name"] = i.name;
  d["regime"] = to_string(i.regime);
  d["nprops"] = i.nprops;
  d["nstatv_user"] = i.nstatv_user;
  d["prop_names"] = i.prop_names;
  d["description"] = i.description;
  return d;
}

std::vector<double> host_state(const Material& m, const std::vector<double>& props) {
  const MaterialInfo& i = m.info();
  const StateLayout layout{i.regime, i.nstatv_user};
  return pack_state(layout, 0.0, UmatStress{},
                    i.regime == Regime::SmallStrain ? std::optional<UmatStrain>(UmatStrain{})
                                                    : std::nullopt,
                    m.impl->initial_state(props));
}

py::tuple umat_call(const Material& m, const std::vector<double>& props, const Vec6& stress,
                    std::optional<std::vector<double>> statev, const Vec6& stran,
                    const Vec6& dstran, const Tensor2& dfgrd0, const Tensor2& dfgrd1,
                    double time, double dtime) {
  UmatCall c;
  c.props = props;
  c.stress = UmatStress::from(stress);
  c.statev = statev ? *statev : m.impl->initial_state(props);
  c.stran = UmatStrain::from(stran);
  c.dstran = UmatStrain::from(dstran);
  c.dfgrd0 = dfgrd0;
  c.dfgrd1 = dfgrd1;
  c.time = time;
  c.dtime = dtime;
  UmatResult r;
  {
    py::gil_scoped_release release;
    r = m.impl->evaluate(c);
  }
  return py::make_tuple(r.stress.vec(), r.statev, r.ddsdde);
}

py::tuple host_response(const HostResponse& r) {
  return py::make_tuple(r.s.vec(), r.tangent, r.state);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Constitutive-model bridge between UMAT-style and host-style conventions.";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ContractViolation>(m, "ContractViolation", error);
  py::register_exception<InvalidConfiguration>(m, "InvalidConfiguration", error);
  py::register_exception<SingularMatrix>(m, "SingularMatrix", error);
  py::register_exception<MaterialError>(m, "MaterialError", error);
  py::register_exception<PluginError>(m, "PluginError", error);
  py::register_exception<ParseError>(m, "ParseError", error);

  // Voigt orders
  m.def("strain_host_to_umat", [](const Vec6& v) {
    return reorder_strain_host_to_umat(HostStrain::from(v)).vec();
  });
  m.def("strain_umat_to_host", [](const Vec6& v) {
    return reorder_strain_umat_to_host(UmatStrain::from(v)).vec();
  });
  m.def("stress_umat_to_host", [](const Vec6& v) {
    return reorder_stress_umat_to_host(UmatStress::from(v)).vec();
  });
  m.def("stress_host_to_umat", [](const Vec6& v) {
    return reorder_stress_host_to_umat(HostStress::from(v)).vec();
  });
  m.def("tangent_umat_to_host", &reorder_tangent_umat_to_host);
  m.def("tangent_host_to_umat", &reorder_tangent_host_to_umat);

  // Kinematics and stress transfer
  m.def("polar_decompose", [](const Tensor2& f) {
    const auto p = polar_decompose(f);
    return py::make_tuple(p.rotation, p.stretch);
  }, "F = R U; returns (R, U).");
  m.def("second_pk", &bridge::cauchy_to_second_pk, py::arg("cauchy"), py::arg("F"));
  m.def("dS_dF",
        [](const Matrix6& ddsdde, const Tensor2& tau, const Tensor2& f) {
          return Eigen::MatrixXd(bridge::tangent_jaumann_to_dSdF(tensor4_from_ddsdde(ddsdde), tau, f));
        },
        py::arg("ddsdde"), py::arg("tau"), py::arg("F"),
        "9x9 dS_ij/dF_kl (row-major pairs) from a Jaumann DDSDDE and Kirchhoff stress.");

  // Materials
  py::class_<Material>(m, "Material")
      .def_property_readonly("info", [](const Material& self) { return info_dict(self.info()); })
      .def_property_readonly("name", [](const Material& self) { return self.info().name; })
      .def("initial_state", [](const Material& self, const std::vector<double>& props) {
        return self.impl->initial_state(props);
      })
      .def("host_state", &host_state, py::arg("props"),
           "Bridge state vector at t = 0 (time, stress and strain header, user slots).")
      .def("umat", &umat_call, py::arg("props"), py::arg("stress") = Vec6::Zero(),
           py::arg("statev") = std::nullopt, py::arg("stran") = Vec6::Zero(),
           py::arg("dstran") = Vec6::Zero(), py::arg("dfgrd0") = Tensor2::Identity(),
           py::arg("dfgrd1") = Tensor2::Identity(), py::arg("time") = 0.0,
           py::arg("dtime") = 1.0, "Raw UMAT-style call; returns (stress, statev, ddsdde).")
      .def("eval_small",
           [](const Material& self, const std::vector<double>& props, const Vec6& strain,
              const std::vector<double>& state, double delta, double fault) {
             HostRequest r;
             r.regime = Regime::SmallStrain;
             r.strain = HostStrain::from(strain);
             r.par = props;
             r.state = state;
             r.delta = delta;
             py::gil_scoped_release release;
             return bridge::eval(r, *self.impl, {fault});
           },
           py::arg("props"), py::arg("strain"), py::arg("state"), py::arg("delta") = 1.0,
           py::arg("fault") = 1.0)
      .def("eval_finite",
           [](const Material& self, const std::vector<double>& props, const Tensor2& f_old,
              const Tensor2& f_new, const std::vector<double>& state, double delta, double fault) {
             HostRequest r;
             r.regime = Regime::FiniteStrain;
             r.f_old = f_old;
             r.f_new = f_new;
             r.par = props;
             r.state = state;
             r.delta = delta;
             py::gil_scoped_release release;
             return bridge::eval(r, *self.impl, {fault});
           },
           py::arg("props"), py::arg("f_old"), py::arg("f_new"), py::arg("state"),
           py::arg("delta") = 1.0, py::arg("fault") = 1.0)
      .def("__repr__", [](const Material& self) { return "<Material " + self.info().name + ">"; });

  py::class_<HostResponse>(m, "HostResponse")
      .def_property_readonly("stress", [](const HostResponse& r) { return r.s.vec(); })
      .def_readonly("tangent", &HostResponse::tangent)
      .def_readonly("state", &HostResponse::state)
      .def("__iter__", [](const HostResponse& r) { return py::iter(host_response(r)); });

  m.def("material_names", &builtin_material_names);
  m.def("material", &builtin, py::arg("name"));
  m.def("load_plugin",
        [](const std::string& path) { return Material{load_plugin_material(path)}; },
        py::arg("name_or_path"),
        "Loads a shared-library material; bare names are searched in CONSTIKIT_PLUGIN_PATH.");

  m.def("tangent_check",
        [](const Material& mat, int samples, std::uint64_t seed, std::optional<double> tol,
           std::vector<double> props, double fault) {
          tangent_check::Options o;
          o.samples = samples;
          o.seed = seed;
          o.tolerance = tol;
          o.props = std::move(props);
          o.fault.scale = fault;
          tangent_check::Report r;
          {
            py::gil_scoped_release release;
            r = tangent_check::run(*mat.impl, o);
          }
          py::dict d;
          d["material"] = r.material;
          d["regime"] = to_string(r.regime);
          d["tolerance"] = r.tolerance;
          d["max_error"] = r.max_error();
          d["passed"] = r.passed();
          std::vector<double> errs;
          for (const auto& s : r.samples) errs.push_back(s.rel_error);
          d["errors"] = errs;
          return d;
        },
        py::arg("material"), py::arg("samples") = 20, py::arg("seed") = 0,
        py::arg("tolerance") = std::nullopt, py::arg("props") = std::vector<double>{},
        py::arg("fault") = 1.0);

  // Convergence norms
  m.def("norm_abaqus_style",
        [](const Eigen::VectorXd& r, const std::vector<double>& history, double fallback) {
          return fe::norm_abaqus_style(r, history, fallback);
        },
        py::arg("residual"), py::arg("force_history"), py::arg("fallback_reference") = 0.0);
  m.def("norm_comsol_style", &fe::norm_comsol_style, py::arg("error_estimate"), py::arg("solution"));
  m.def("default_tolerance", [](const std::string& kind) {
    return fe::default_tolerance(fe::norm_kind_from_string(kind));
  });

  // Cases
  m.def("run_case",
        [](const std::string& path, const std::string& out_dir) {
          const fe::CaseDefinition c = fe::load_case(path);
          fe::SolveResult r;
          {
            py::gil_scoped_release release;
            r = fe::run_case(c, out_dir);
          }
          py::dict d;
          d["name"] = c.name;
          d["converged"] = r.converged;
          d["failure"] = r.failure;
          d["increments"] = r.increments.size();
          d["iterations"] = r.trace.iterations_per_increment();
          py::list curve;
          if (!c.output.force_set.empty())
            for (const auto& p : fe::load_curve(c, r.increments))
              curve.append(py::make_tuple(p.time, p.displacement, p.force));
          d["curve"] = curve;
          return d;
        },
        py::arg("case_path"), py::arg("out_dir"));

  // Hydrogen
  m.def("trap_density", &hydrogen::trap_density, py::arg("eps_p"));
  m.def("oriani_trapped",
        [](double c_l, double n_t) { return hydrogen::oriani_trapped(c_l, n_t, {}); },
        py::arg("c_l"), py::arg("n_t"));
  m.def("hydrogen_demo",
        [](const std::string& out_dir, double load_scale) {
          hydrogen::CoupledResult r;
          {
            py::gil_scoped_release release;
            r = hydrogen::run_demo(out_dir, load_scale);
          }
          py::dict d;
          d["converged"] = r.converged;
          d["failure"] = r.failure;
          d["steps"] = r.steps.size();
          if (!r.steps.empty()) {
            const auto& last = r.steps.back();
            d["c_l"] = last.transport.c_l;
            d["c_t"] = last.transport.c_t;
            d["n_t"] = last.transport.n_t;
            d["sigma_h"] = last.sigma_h;
            d["correlation"] = hydrogen::correlation(last.transport.c_l, last.sigma_h);
          }
          return d;
        },
        py::arg("out_dir"), py::arg("load_scale") = 1.0);
}
