#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "semieff/conditioning.hpp"
#include "semieff/efficiency.hpp"
#include "semieff/errors.hpp"
#include "semieff/estimate.hpp"
#include "semieff/godambe.hpp"
#include "semieff/tangent.hpp"

namespace py = pybind11;
using namespace semieff;

namespace {

ModelPtr model_of(const std::string& name) { return find_builtin_model(name); }

InferenceFn psi_of(const std::string& name, const ModelPtr& model) {
  if (name == "score") return score_function(model);
  if (model->sample_dim() == 2)
    for (auto& f : conditioning_battery(poisson_pair_factorization()))
      if (f.name == name) return f;
  for (auto& f : location_battery())
    if (f.name == name) return f;
  throw ConfigError("unknown inference function '" + name + "'");
}

py::dict efficiency(const std::string& model, const Vec& theta, const Vec& z) {
  const auto r = efficiency_analysis(*model_of(model), theta, z);
  py::dict d;
  d["J_E"] = r.J_E;
  d["J_I"] = r.J_I;
  d["attainable"] = r.attainability.attainable;
  d["worst_deviation"] = r.attainability.worst_deviation;
  d["fia_dim"] = r.fia.dim();
  return d;
}

py::dict godambe(const std::string& model, const std::string& psi, const Vec& theta, const Vec& z) {
  const auto m = model_of(model);
  const auto p = materialise(*m, theta, z, m->default_scheme(theta, z));
  const auto r = godambe_information(psi_of(psi, m), *m, theta, z, p);
  py::dict d;
  d["S"] = r.S;
  d["V"] = r.V;
  d["J"] = r.J;
  d["regular"] = r.regularity.passed();
  return d;
}

py::dict check_path(const std::string& model, const Vec& theta, const Vec& z, double scale) {
  const auto m = model_of(model);
  const auto p = materialise(*m, theta, z, m->default_scheme(theta, z));
  const Vec dth = Vec::Unit(theta.size(), 0);
  const auto nu = scale * score(*m, theta, z, p)[0];
  const auto diag = diagnose_path(model_path(*m, theta, z, dth, Vec::Zero(z.size()), p, nu));
  py::list rows;
  for (const auto& r : diag.rows)
    rows.append(py::dict(py::arg("t") = r.t, py::arg("l1") = r.l1, py::arg("l2") = r.l2,
                         py::arg("sup") = r.sup, py::arg("weak1") = r.weak1,
                         py::arg("weak2") = r.weak2));
  py::dict d;
  d["rows"] = rows;
  d["l1"] = to_string(diag.l1);
  d["l2"] = to_string(diag.l2);
  d["sup"] = to_string(diag.sup);
  d["weak"] = to_string(diag.weak);
  d["slope_l2"] = diag.slope_l2;
  return d;
}

py::dict mc(const std::string& model, const std::string& psi, const Vec& theta, const Vec& z,
            std::size_t n, std::size_t reps, std::uint64_t seed) {
  const auto m = model_of(model);
  McReport r;
  {
    py::gil_scoped_release nogil;
    r = mc_study(psi_of(psi, m), *m, theta, z, n, reps, seed);
  }
  py::dict d;
  d["empirical_cov"] = r.empirical_cov;
  d["target_J_inv"] = r.target_J_inv;
  d["failures"] = r.failures;
  d["valid"] = r.valid;
  return d;
}

py::list conditioning_demo(const std::vector<double>& theta_grid, const std::vector<double>& z_grid) {
  std::vector<Vec> zs;
  for (double z : z_grid) zs.push_back(Vec::Constant(1, z));
  const auto fm = poisson_pair_factorization();
  const auto rep = conditioning_optimality_demo(fm, theta_grid, zs, conditioning_battery(fm));
  py::list out;
  for (const auto& pt : rep.points)
    out.append(py::dict(py::arg("theta") = pt.theta, py::arg("z") = pt.z[0],
                        py::arg("J_conditional") = pt.J_conditional,
                        py::arg("J_closed_form") = pt.J_closed_form,
                        py::arg("weakly_first") = pt.conditional_weakly_first));
  return out;
}

}  // namespace

PYBIND11_MODULE(_semieff, m) {
  m.doc() = "Semiparametric efficiency and inference-function diagnostics";

  // Translators run newest first, so the base class goes in before its subclasses.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);

  m.def("models", [] {
    std::vector<std::string> names;
    for (const auto& mod : builtin_models()) names.push_back(mod->name());
    return names;
  });
  m.def("efficiency", &efficiency, py::arg("model"), py::arg("theta"), py::arg("z"));
  m.def("godambe", &godambe, py::arg("model"), py::arg("psi"), py::arg("theta"), py::arg("z"));
  m.def("check_path", &check_path, py::arg("model"), py::arg("theta"), py::arg("z"),
        py::arg("scale") = 1.0);
  m.def("mc", &mc, py::arg("model"), py::arg("psi"), py::arg("theta"), py::arg("z"),
        py::arg("n"), py::arg("reps"), py::arg("seed"));
  m.def("conditioning_demo", &conditioning_demo, py::arg("theta_grid"), py::arg("z_grid"));
}
