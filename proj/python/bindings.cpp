#include <sstream>

#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sirflock/analysis.hpp"
#include "sirflock/errors.hpp"
#include "sirflock/model.hpp"
#include "sirflock/runner.hpp"
#include "sirflock/scenario.hpp"

namespace py = pybind11;
using namespace sirflock;

namespace {

py::array_t<double> states_array(const Trajectory& t) {
    const std::size_t n = t.snapshots.empty() ? 0 : t.snapshots.front().size();
    py::array_t<double> out({t.size(), n, std::size_t{3}});
    auto v = out.mutable_unchecked<3>();
    for (std::size_t k = 0; k < t.size(); ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto& w = t.snapshots[k].states[i];
            v(k, i, 0) = w.s;
            v(k, i, 1) = w.i;
            v(k, i, 2) = w.r;
        }
    }
    return out;
}

py::array_t<double> positions_array(const Trajectory& t) {
    const std::size_t n = t.snapshots.empty() ? 0 : t.snapshots.front().size();
    const std::size_t d = t.snapshots.empty() ? 0 : t.snapshots.front().dim;
    py::array_t<double> out({t.size(), n, d});
    auto v = out.mutable_unchecked<3>();
    for (std::size_t k = 0; k < t.size(); ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < d; ++c) v(k, i, c) = t.snapshots[k].coords[i * d + c];
    return out;
}

py::dict diagnostics_dict(const Trajectory& t) {
    std::vector<double> d_min, d_max, total_i, mean_i, max_speed;
    std::vector<std::vector<double>> com;
    for (const auto& row : t.diagnostics) {
        d_min.push_back(row.d_min);
        d_max.push_back(row.d_max);
        total_i.push_back(row.total_i);
        mean_i.push_back(row.mean_i);
        max_speed.push_back(row.max_speed);
        com.push_back(row.com);
    }
    py::dict out;
    out["t"] = t.times;
    out["d_min"] = d_min;
    out["d_max"] = d_max;
    out["total_I"] = total_i;
    out["mean_I"] = mean_i;
    out["com"] = com;
    out["max_speed"] = max_speed;
    return out;
}

} // namespace

PYBIND11_MODULE(sirflock, m) {
    m.doc() = "SIR epidemic dynamics coupled to attraction-repulsion flocking";

    auto error = py::register_exception<Error>(m, "Error");
    py::register_exception<ValidationError>(m, "ValidationError", error);
    py::register_exception<ParseError>(m, "ParseError", error);
    py::register_exception<CollisionError>(m, "CollisionError", error);
    py::register_exception<DriftError>(m, "DriftError", error);

    py::class_<EpidemicState>(m, "EpidemicState")
        .def(py::init<>())
        .def(py::init([](double s, double i, double r) { return EpidemicState{s, i, r}; }), py::arg("s"),
             py::arg("i"), py::arg("r"))
        .def_readwrite("s", &EpidemicState::s)
        .def_readwrite("i", &EpidemicState::i)
        .def_readwrite("r", &EpidemicState::r)
        .def("total", &EpidemicState::total)
        .def(py::self == py::self)
        .def("__repr__", [](const EpidemicState& w) {
            std::ostringstream os;
            os << "EpidemicState(s=" << w.s << ", i=" << w.i << ", r=" << w.r << ")";
            return os.str();
        });

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def_readwrite("n", &ModelParams::n)
        .def_readwrite("d", &ModelParams::d)
        .def_readwrite("kappa1", &ModelParams::kappa1)
        .def_readwrite("kappa2", &ModelParams::kappa2)
        .def_readwrite("kappa3", &ModelParams::kappa3)
        .def_readwrite("alpha", &ModelParams::alpha)
        .def_readwrite("beta", &ModelParams::beta)
        .def_readwrite("gamma", &ModelParams::gamma_exp)
        .def_readwrite("l_offset", &ModelParams::l_offset)
        .def_readwrite("eps_a", &ModelParams::eps_a)
        .def_readwrite("eps_r", &ModelParams::eps_r)
        .def_readwrite("recovery", &ModelParams::recovery)
        .def_readwrite("symptom", &ModelParams::symptom)
        .def_readwrite("confirm_threshold", &ModelParams::confirm_threshold)
        .def("validate", [](const ModelParams& p) { validate(p); });

    py::class_<Ensemble>(m, "Ensemble")
        .def(py::init<std::size_t, std::size_t>(), py::arg("n"), py::arg("d"))
        .def_readwrite("dim", &Ensemble::dim)
        .def_readwrite("states", &Ensemble::states)
        .def_readwrite("coords", &Ensemble::coords)
        .def("size", &Ensemble::size)
        .def("position", [](const Ensemble& e, std::size_t i) {
            if (i >= e.size()) throw py::index_error("particle index out of range");
            const auto p = e.position(i);
            return std::vector<double>(p.begin(), p.end());
        })
        .def(py::self == py::self);

    py::class_<SimulationConfig>(m, "SimulationConfig")
        .def(py::init<>())
        .def_readwrite("dt", &SimulationConfig::dt)
        .def_readwrite("t_end", &SimulationConfig::t_end)
        .def_readwrite("record_stride", &SimulationConfig::record_stride)
        .def_readwrite("collision_tol", &SimulationConfig::collision_tol)
        .def_readwrite("drift_tol", &SimulationConfig::drift_tol);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_readonly("snapshots", &Trajectory::snapshots)
        .def("__len__", &Trajectory::size)
        .def("states", &states_array, "Array of shape (snapshots, n, 3) holding S, I, R")
        .def("positions", &positions_array, "Array of shape (snapshots, n, d)")
        .def("diagnostics", &diagnostics_dict, "Per-snapshot diagnostics as a dict of lists");

    py::class_<GeneratorSpec>(m, "GeneratorSpec")
        .def(py::init<>())
        .def_readwrite("n_uninfected", &GeneratorSpec::n_uninfected)
        .def_readwrite("n_infected", &GeneratorSpec::n_infected)
        .def_readwrite("uninfected_state", &GeneratorSpec::uninfected_state)
        .def_readwrite("infected_state", &GeneratorSpec::infected_state)
        .def_readwrite("box_side", &GeneratorSpec::box_side)
        .def_readwrite("seed", &GeneratorSpec::seed)
        .def_readwrite("min_separation", &GeneratorSpec::min_separation);

    py::class_<ScenarioSpec>(m, "ScenarioSpec")
        .def(py::init<>())
        .def_readwrite("name", &ScenarioSpec::name)
        .def_readwrite("params", &ScenarioSpec::params)
        .def_readwrite("sim", &ScenarioSpec::sim)
        .def_readwrite("init", &ScenarioSpec::init)
        .def(py::self == py::self);

    py::class_<BoundReport>(m, "BoundReport")
        .def_readonly("lambda_rate", &BoundReport::lambda_rate)
        .def_readonly("lambda_relaxed_ok", &BoundReport::lambda_relaxed_ok)
        .def_readonly("delta_q", &BoundReport::delta_q)
        .def_readonly("log_capital_lambda", &BoundReport::log_capital_lambda)
        .def_readonly("capital_lambda", &BoundReport::capital_lambda)
        .def_readonly("upper_bound_ok", &BoundReport::upper_bound_ok)
        .def_readonly("upper_bound_ok_reciprocal", &BoundReport::upper_bound_ok_reciprocal)
        .def_readonly("diameter_ceiling", &BoundReport::diameter_ceiling)
        .def_readonly("x_infinity", &BoundReport::x_infinity)
        .def_readonly("two_particle_b_ok", &BoundReport::two_particle_b_ok);

    py::class_<DecayFit>(m, "DecayFit")
        .def_readonly("slope", &DecayFit::slope)
        .def_readonly("intercept", &DecayFit::intercept)
        .def_readonly("window_start", &DecayFit::window_start)
        .def_readonly("window_end", &DecayFit::window_end)
        .def_readonly("residual", &DecayFit::residual)
        .def_readonly("samples", &DecayFit::samples);

    py::class_<EmpiricalSummary>(m, "EmpiricalSummary")
        .def_readonly("inf_d_min", &EmpiricalSummary::inf_d_min)
        .def_readonly("sup_d_max", &EmpiricalSummary::sup_d_max)
        .def_readonly("final_total_i", &EmpiricalSummary::final_total_i)
        .def_readonly("peak_mean_i", &EmpiricalSummary::peak_mean_i)
        .def_readonly("final_max_speed", &EmpiricalSummary::final_max_speed)
        .def_readonly("com_drift", &EmpiricalSummary::com_drift)
        .def_readonly("max_simplex_drift", &EmpiricalSummary::max_simplex_drift)
        .def_readonly("min_state_coord", &EmpiricalSummary::min_state_coord);

    py::class_<RunReport>(m, "RunReport")
        .def_readonly("scenario", &RunReport::scenario)
        .def_readonly("bounds", &RunReport::bounds)
        .def_readonly("decay_fit", &RunReport::decay_fit)
        .def_readonly("empirical", &RunReport::empirical)
        .def_readonly("pass_flags", &RunReport::pass_flags)
        .def_readonly("failure", &RunReport::failure)
        .def("all_passed", &RunReport::all_passed);

    py::class_<RunOutcome>(m, "RunOutcome")
        .def_readonly("trajectory", &RunOutcome::trajectory)
        .def_readonly("report", &RunOutcome::report);

    m.def("uniform_params", &uniform_params, py::arg("n"), py::arg("d"), py::arg("recovery"),
          py::arg("symptom") = 1.0);
    m.def("similarity", &similarity);
    m.def("attract_weight", &attract_weight);
    m.def("repulse_weight", &repulse_weight);
    m.def(
        "epidemic_rhs",
        [](const Ensemble& e, const ModelParams& p) {
            std::vector<std::tuple<double, double, double>> out;
            for (const auto& r : epidemic_rhs(e, p)) out.emplace_back(r.ds, r.di, r.dr);
            return out;
        },
        "Per-particle (dS, dI, dR)");
    m.def("position_rhs", [](const Ensemble& e, const ModelParams& p) { return position_rhs(e, p); });
    m.def("rk4_step", [](const Ensemble& e, const ModelParams& p, double dt) { return rk4_step(e, p, dt); });
    m.def("simulate", &simulate, py::arg("e0"), py::arg("params"), py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("confirmed_set", &confirmed_set);

    m.def("decay_rate_lambda", &decay_rate_lambda);
    m.def("relaxed_decay_ok", &relaxed_decay_ok);
    m.def("delta_q_bound", &delta_q_bound);
    m.def("log_capital_lambda", &log_capital_lambda);
    m.def("ode_sup_bound", &ode_sup_bound, py::arg("a"), py::arg("b"), py::arg("p"), py::arg("q"), py::arg("y0"));
    m.def("diameter_ceiling", &diameter_ceiling);
    m.def("two_particle_equilibrium", &two_particle_equilibrium);
    m.def("bound_report", &bound_report);
    m.def("fit_exponential_rate", py::overload_cast<const Trajectory&, double>(&fit_exponential_rate),
          py::arg("trajectory"), py::arg("fraction") = 0.6);

    m.def("preset_names", &preset_names);
    m.def("preset", [](const std::string& name) {
        try {
            return preset(name);
        } catch (const std::out_of_range& e) {
            throw py::key_error(e.what());
        }
    });
    m.def("parse_scenario", &parse_scenario, py::arg("text"), py::arg("source") = "<scenario>");
    m.def("format_scenario", &format_scenario);
    m.def("load_scenario", &load_scenario);
    m.def("initial_ensemble", &initial_ensemble);
    m.def("run_scenario", [](const ScenarioSpec& s) { return run_scenario(s); },
          py::call_guard<py::gil_scoped_release>());
    m.def(
        "run_command",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = run_command(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        "Run the command-line interface in-process; returns (exit_code, stdout, stderr)");
}
