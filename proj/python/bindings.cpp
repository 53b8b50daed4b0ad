#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "alq/io.hpp"

namespace py = pybind11;
using namespace alq;

namespace {

Mat to_mat(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() == 0) return Mat{{*a.data()}};
  if (a.ndim() == 1) return Mat(static_cast<std::size_t>(a.shape(0)), 1, std::vector<double>(a.data(), a.data() + a.size()));
  if (a.ndim() != 2) throw py::value_error("expected a 1-D or 2-D array");
  return Mat(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
             std::vector<double>(a.data(), a.data() + a.size()));
}

py::array_t<double> to_numpy(const Mat& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  std::copy(m.data(), m.data() + m.size(), out.mutable_data());
  return out;
}

PlantModel plant_from(const py::object& A_p, const py::object& B_p, const py::object& C_p) {
  PlantModel p;
  p.A_p = to_mat(A_p);
  p.B_p = to_mat(B_p);
  p.C_p = to_mat(C_p);
  return p;
}

py::dict trace_dict(const Trace& tr) {
  py::dict d;
  d["t"] = py::array_t<double>(tr.t.size(), tr.t.data());
  for (std::size_t i = 0; i < tr.names.size(); ++i)
    d[py::str(tr.names[i])] = py::array_t<double>(tr.columns[i].size(), tr.columns[i].data());
  return d;
}

py::dict summary_dict(const RunSummary& s) {
  py::dict d;
  d["final_theta_err"] = s.final_theta_err;
  d["final_eref_err"] = s.final_eref_err;
  d["initial_theta_err"] = s.initial_theta_err;
  d["activation_theta_err"] = s.activation_theta_err;
  d["monotone_fraction"] = s.monotone_fraction;
  d["omega_peak"] = s.omega_peak;
  d["activation_time"] = s.activation_time ? py::object(py::float_(*s.activation_time)) : py::object(py::none());
  d["cost_adaptive"] = s.cost_adaptive;
  d["cost_ideal"] = s.cost_ideal;
  d["cost_gap"] = s.cost_gap;
  d["xi_peak"] = s.xi_peak;
  d["xi_tail_max"] = s.xi_tail_max;
  d["ticks"] = s.ticks;
  d["overflow_flag"] = s.overflow_flag;
  return d;
}

py::tuple run(const Scenario& s) {
  RunResult r;
  {
    py::gil_scoped_release nogil;
    r = run_closed_loop(s);
  }
  return py::make_tuple(trace_dict(r.trace), summary_dict(r.summary));
}

}  // namespace

PYBIND11_MODULE(_alq, m) {
  m.doc() = "Adaptive LQ self-tuning regulator core";
  py::register_exception<Error>(m, "AlqError", PyExc_RuntimeError);

  m.def("det", [](const py::object& a) { return det(to_mat(a)); });
  m.def("adjugate", [](const py::object& a) { return to_numpy(adjugate(to_mat(a))); });
  m.def("mat_exp_taylor", [](const py::object& d, double tau, int p) { return to_numpy(mat_exp_taylor(to_mat(d), tau, p)); },
        py::arg("d"), py::arg("tau"), py::arg("p"));
  m.def("mat_exp_oracle", [](const py::object& d, double tau) { return to_numpy(mat_exp_oracle(to_mat(d), tau)); },
        py::arg("d"), py::arg("tau"));
  m.def("taylor_remainder_bound",
        [](const py::object& d, double tau, int p) { return taylor_remainder_bound(to_mat(d), tau, p); });
  m.def("eigenvalues", [](const py::object& a) { return eigenvalues(to_mat(a)).eigenvalues; });
  m.def("norms", [](const py::object& a) {
    const Norms n = norms(to_mat(a));
    return py::make_tuple(n.spectral, n.frobenius);
  });

  m.def("augment", [](const py::object& A_p, const py::object& B_p, const py::object& C_p, double vartheta) {
    const AugmentedSystem s = augment(plant_from(A_p, B_p, C_p), vartheta);
    py::dict d;
    d["A"] = to_numpy(s.A);
    d["B"] = to_numpy(s.B);
    d["B_r"] = to_numpy(s.B_r);
    d["C"] = to_numpy(s.C);
    return d;
  });
  m.def("build_hamiltonian", [](const py::object& A_p, const py::object& B_p, const py::object& C_p, double vartheta,
                                const py::object& Q, const py::object& R) {
    return to_numpy(build_hamiltonian(augment(plant_from(A_p, B_p, C_p), vartheta), {to_mat(Q), to_mat(R)}));
  });
  m.def("solve_lq_analytical", [](const py::object& A_p, const py::object& B_p, const py::object& C_p, double vartheta,
                                  const py::object& Q, const py::object& R, double tau_inf) {
    const LqSolution s = solve_lq_analytical(augment(plant_from(A_p, B_p, C_p), vartheta), {to_mat(Q), to_mat(R)}, tau_inf);
    py::dict d;
    d["P"] = to_numpy(s.P);
    d["V"] = to_numpy(s.V);
    d["K_x"] = to_numpy(s.K_x);
    d["K_r"] = to_numpy(s.K_r);
    d["theta"] = to_numpy(s.theta);
    return d;
  });

  m.def("reproduce_table1", [](const std::string& norm) {
    NormKind k = NormKind::Frobenius;
    if (norm == "spectral") k = NormKind::Spectral;
    else if (norm != "frobenius") throw py::value_error("norm must be 'frobenius' or 'spectral'");
    py::list out;
    for (const auto& c : reproduce_table1(k)) out.append(py::make_tuple(c.tau_inf, c.p, c.eps_norm));
    return out;
  }, py::arg("norm") = "frobenius");
  m.def("reproduce_spectra", []() {
    py::list out;
    for (const auto& s : reproduce_spectra()) out.append(py::make_tuple(s.label, s.vartheta, s.eigenvalues));
    return out;
  });

  m.def("presets", []() {
    py::list names;
    for (const auto& [k, v] : preset_scenarios()) names.append(k);
    return names;
  });
  m.def("run_preset", [](const std::string& name, std::optional<double> duration, std::optional<double> dt) {
    Scenario s = preset(name);
    if (duration) s.duration = *duration;
    if (dt) s.dt = *dt;
    return run(s);
  }, py::arg("name"), py::arg("duration") = py::none(), py::arg("dt") = py::none());
  m.def("run_config", [](const std::string& yaml_text) { return run(parse_config(yaml_text).scenario); });
  m.def("normalize_config", [](const std::string& yaml_text) { return emit_config(parse_config(yaml_text)); });
}
