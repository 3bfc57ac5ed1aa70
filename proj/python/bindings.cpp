#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "trapdyn/error.hpp"
#include "trapdyn/opt.hpp"
#include "trapdyn/oracle.hpp"
#include "trapdyn/report.hpp"
#include "trapdyn/sim.hpp"
#include "trapdyn/system_io.hpp"
#include "trapdyn/systems.hpp"

namespace py = pybind11;
using namespace trapdyn;

namespace {

using Term = std::tuple<int, int, int, double>;

LosslessQuadraticSystem make_system(const Vector& c, const Matrix& L,
                                    const std::vector<Term>& terms, bool check) {
  std::vector<QuadTerm> q;
  q.reserve(terms.size());
  for (const auto& [i, j, k, v] : terms) q.push_back({i, j, k, v});
  return {c, L, std::move(q),
          check ? LosslessQuadraticSystem::Validation::kLossless
                : LosslessQuadraticSystem::Validation::kUnchecked};
}

CenterPolicy make_policy(const py::object& center) {
  if (center.is_none()) return CenterPolicy::solver();
  if (py::isinstance<py::str>(center)) {
    const auto s = center.cast<std::string>();
    if (s == "auto" || s == "solver") return CenterPolicy::solver();
    if (s == "zero") return CenterPolicy::zero();
    throw py::value_error("center must be 'auto', 'zero' or a vector");
  }
  return CenterPolicy::user(center.cast<Vector>());
}

}  // namespace

PYBIND11_MODULE(_trapdyn, m) {
  m.doc() = "Trapping regions of lossless quadratic systems";

  py::register_exception<Error>(m, "TrapdynError", PyExc_RuntimeError);

  py::class_<LosslessQuadraticSystem>(m, "System")
      .def(py::init(&make_system), py::arg("c"), py::arg("L"),
           py::arg("terms") = std::vector<Term>{}, py::arg("check") = true,
           "terms are zero-based (i, j, k, value) with j <= k")
      .def_property_readonly("dim", &LosslessQuadraticSystem::dim)
      .def_property_readonly("c", &LosslessQuadraticSystem::c)
      .def_property_readonly("L", &LosslessQuadraticSystem::L)
      .def_property_readonly("terms",
                             [](const LosslessQuadraticSystem& s) {
                               std::vector<Term> out;
                               for (const auto& t : s.terms())
                                 out.emplace_back(t.i, t.j, t.k, t.value);
                               return out;
                             })
      .def("q_slice", &LosslessQuadraticSystem::q_slice)
      .def("rhs", [](const LosslessQuadraticSystem& s, const Vector& x) {
        return eval_rhs(s, x);
      })
      .def("to_json", &system_to_json)
      .def_static("from_json", [](const std::string& text) {
        return parse_system_json(text);
      });

  m.def("lossless_defect", &lossless_defect);

  py::class_<ShiftedForm>(m, "ShiftedForm")
      .def(py::init<const LosslessQuadraticSystem&, Vector>())
      .def_property_readonly("m", &ShiftedForm::m)
      .def_property_readonly("d", &ShiftedForm::d)
      .def_property_readonly("A", &ShiftedForm::A)
      .def_property_readonly("A_s", &ShiftedForm::A_s)
      .def_property_readonly("eigenvalues", &ShiftedForm::eigenvalues)
      .def("energy_rate",
           [](const ShiftedForm& sf, const Vector& y) { return energy_rate(sf, y); });

  py::class_<ExistenceResult>(m, "ExistenceResult")
      .def_readonly("a_star", &ExistenceResult::a_star)
      .def_readonly("m_star", &ExistenceResult::m_star)
      .def_readonly("certificate", &ExistenceResult::certificate)
      .def_readonly("certificate_valid", &ExistenceResult::certificate_valid)
      .def_property_readonly("status",
                             [](const ExistenceResult& r) { return to_string(r.status); });

  m.def("solve_existence", [](const LosslessQuadraticSystem& s, double eps_neg) {
    SolverOptions opts;
    opts.eps_neg = eps_neg;
    return solve_existence(s, opts);
  }, py::arg("system"), py::arg("eps_neg") = 1e-6);

  m.def("conservative_radius", &conservative_radius);
  m.def("tight_radius", [](const ShiftedForm& sf) {
    const auto r = tight_radius_scalar(sf);
    return py::make_tuple(r.radius, r.lambda_star);
  }, "(R_tight, lambda_star) from the scalar route");
  m.def("tight_radius_sdp", [](const ShiftedForm& sf) {
    const auto r = tight_radius_sdp(sf);
    return py::make_tuple(r.radius, r.lambda_star, r.gamma_star);
  });

  m.def("_analyze_json", [](const LosslessQuadraticSystem& s, const py::object& center) {
    return to_json(analyze(s, make_policy(center))).dump();
  }, py::arg("system"), py::arg("center") = py::none());

  m.def("brute_force_radius", [](const ShiftedForm& sf, std::size_t count,
                                 std::uint64_t seed) {
    return oracle::brute_force_radius(ellipsoid_E(sf), count, seed).max_norm_found;
  }, py::arg("shifted"), py::arg("count"), py::arg("seed") = 42);

  m.def("integrate", [](const LosslessQuadraticSystem& s, const Vector& x0,
                        double t_final, double dt) {
    const auto traj = sim::integrate(s, x0, t_final, dt);
    Matrix states(static_cast<Eigen::Index>(traj.size()), s.dim());
    for (std::size_t i = 0; i < traj.size(); ++i) states.row(i) = traj.states[i];
    return py::make_tuple(Eigen::Map<const Vector>(traj.times.data(), traj.size()).eval(),
                          states);
  }, py::arg("system"), py::arg("x0"), py::arg("t_final"), py::arg("dt") = 1e-3);

  auto sysm = m.def_submodule("systems", "Example systems");
  sysm.def("two_state", &systems::two_state);
  sysm.def("lorenz", &systems::lorenz, py::arg("sigma") = 10.0, py::arg("rho") = 28.0,
           py::arg("alpha") = 8.0 / 3.0);
  sysm.def("stacked_lorenz", [](int K, std::uint64_t seed) {
    auto st = systems::stacked_lorenz(K, seed);
    return py::make_tuple(std::move(st.system), st.W);
  });
  sysm.def("zero_system", &systems::zero_system);
  sysm.def("random_orthogonal", &systems::random_orthogonal);
}
