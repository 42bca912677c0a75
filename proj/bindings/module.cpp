#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wavegame/games.hpp"
#include "wavegame/harness.hpp"
#include "wavegame/model.hpp"
#include "wavegame/trs.hpp"

namespace py = pybind11;
using namespace wg;

PYBIND11_MODULE(wavegame, m) {
  m.doc() = "Joint transmit code and receive filter design against worst-case "
            "target impulse responses";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("n_tx", &Scenario::n_tx)
      .def_readwrite("n_rx", &Scenario::n_rx)
      .def_readwrite("code_len", &Scenario::code_len)
      .def_readwrite("tir_len", &Scenario::tir_len)
      .def_readwrite("theta_t", &Scenario::theta_t)
      .def_readwrite("tx_spacing", &Scenario::tx_spacing)
      .def_readwrite("rx_spacing", &Scenario::rx_spacing)
      .def_readwrite("noise_cov", &Scenario::noise_cov)
      .def_readwrite("t0", &Scenario::t0)
      .def_readwrite("radius", &Scenario::radius)
      .def("rx_dim", &Scenario::rx_dim)
      .def("code_dim", &Scenario::code_dim)
      .def("validate", &Scenario::validate);

  py::class_<Waveform>(m, "Waveform")
      .def_readonly("s", &Waveform::s)
      .def_readonly("energy", &Waveform::energy);
  m.def("make_waveform", &make_waveform, py::arg("s"));

  py::class_<Band>(m, "Band")
      .def(py::init([](double f1, double f2, double weight) {
             return Band{f1, f2, weight};
           }),
           py::arg("f1"), py::arg("f2"), py::arg("weight"))
      .def_readwrite("f1", &Band::f1)
      .def_readwrite("f2", &Band::f2)
      .def_readwrite("weight", &Band::weight);

  py::class_<ConstraintCMSC>(m, "ConstraintCMSC")
      .def(py::init<>())
      .def_readwrite("e_t", &ConstraintCMSC::e_t)
      .def_readwrite("delta", &ConstraintCMSC::delta)
      .def_readwrite("s0", &ConstraintCMSC::s0);

  py::class_<ConstraintSCSC>(m, "ConstraintSCSC")
      .def(py::init<>())
      .def_readwrite("e_t", &ConstraintSCSC::e_t)
      .def_readwrite("delta", &ConstraintSCSC::delta)
      .def_readwrite("s0", &ConstraintSCSC::s0)
      .def_readwrite("bands", &ConstraintSCSC::bands)
      .def_readwrite("e_i", &ConstraintSCSC::e_i);

  py::class_<games::Algo2Params>(m, "Algo2Params")
      .def(py::init<>())
      .def_readwrite("beta", &games::Algo2Params::beta)
      .def_readwrite("eta", &games::Algo2Params::eta)
      .def_readwrite("eps", &games::Algo2Params::eps)
      .def_readwrite("max_iter", &games::Algo2Params::max_iter)
      .def_readwrite("m_trials", &games::Algo2Params::m_trials)
      .def_readwrite("seed", &games::Algo2Params::seed);

  py::class_<games::Algo3Params>(m, "Algo3Params")
      .def(py::init<>())
      .def_readwrite("eps", &games::Algo3Params::eps)
      .def_readwrite("max_iter", &games::Algo3Params::max_iter)
      .def_readwrite("init_waveform", &games::Algo3Params::init_waveform);

  py::class_<IterRecord>(m, "IterRecord")
      .def_readonly("iter", &IterRecord::iter)
      .def_readonly("objective", &IterRecord::objective)
      .def_readonly("gap", &IterRecord::gap)
      .def_readonly("has_gap", &IterRecord::has_gap)
      .def_readonly("wall_ms", &IterRecord::wall_ms);

  py::class_<DesignResult>(m, "DesignResult")
      .def_readonly("s_opt", &DesignResult::s_opt)
      .def_readonly("w_opt", &DesignResult::w_opt)
      .def_readonly("t_worst", &DesignResult::t_worst)
      .def_readonly("sinr_worst", &DesignResult::sinr_worst)
      .def_readonly("trace", &DesignResult::trace)
      .def_readonly("converged", &DesignResult::converged)
      .def_readonly("note", &DesignResult::note)
      .def_readonly("relaxed_value", &DesignResult::relaxed_value);

  py::class_<games::NashReport>(m, "NashReport")
      .def_readonly("target_rel_err", &games::NashReport::target_rel_err)
      .def_readonly("max_violation", &games::NashReport::max_violation)
      .def_readonly("violations", &games::NashReport::violations)
      .def_readonly("n_trials", &games::NashReport::n_trials);

  py::class_<solvers::TrsResult>(m, "TrsResult")
      .def_readonly("t_star", &solvers::TrsResult::t_star)
      .def_readonly("value", &solvers::TrsResult::value)
      .def_readonly("multiplier", &solvers::TrsResult::multiplier);

  py::class_<games::FeasibleInit>(m, "FeasibleInit")
      .def_readonly("w", &games::FeasibleInit::w)
      .def_readonly("stopband_energy", &games::FeasibleInit::stopband_energy)
      .def_readonly("kkt_residual", &games::FeasibleInit::kkt_residual);

  m.def("noise_covariance", &model::noise_covariance, py::arg("rho"), py::arg("dim"));
  m.def("lfm_reference", &model::lfm_reference, py::arg("n_tx"), py::arg("code_len"),
        py::arg("e_t"));
  m.def("sinr", &model::sinr, py::arg("scenario"), py::arg("s"), py::arg("w"),
        py::arg("t"));
  m.def("optimal_filter", &model::optimal_filter, py::arg("scenario"), py::arg("s"),
        py::arg("t"));
  m.def("detection_probability", &model::detection_probability, py::arg("sinr"),
        py::arg("pfa"));
  m.def("sample_ball", &solvers::sample_ball, py::arg("t0"), py::arg("r"), py::arg("n"),
        py::arg("seed"));
  m.def("min_quad_ball", &solvers::min_quad_ball, py::arg("u"), py::arg("t0"),
        py::arg("r"));

  m.def("worst_case_tir", &games::worst_case_tir, py::arg("scenario"), py::arg("s"));
  m.def("design_ec", &games::design_ec, py::arg("scenario"), py::arg("e_t"));
  m.def("verify_nash_ec", &games::verify_nash_ec, py::arg("scenario"), py::arg("e_t"),
        py::arg("result"), py::arg("n_trials"), py::arg("seed"));
  m.def("design_cmsc", &games::design_cmsc, py::arg("scenario"), py::arg("constraint"),
        py::arg("params") = games::Algo2Params{});
  m.def("design_scsc", &games::design_scsc, py::arg("scenario"), py::arg("constraint"),
        py::arg("params") = games::Algo3Params{});
  m.def("feasible_init", &games::feasible_init, py::arg("scenario"),
        py::arg("constraint"));
}
