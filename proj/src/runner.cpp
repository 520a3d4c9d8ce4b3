#include "sirflock/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "sirflock/errors.hpp"
#include "sirflock/model.hpp"
#include "sirflock/output.hpp"

namespace sirflock {

bool RunReport::all_passed() const {
    return failure.empty() &&
           std::all_of(pass_flags.begin(), pass_flags.end(), [](const auto& f) { return f.second; });
}

double gradient_identity_residual(const Ensemble& e, const ModelParams& p, double collision_tol) {
    const auto rhs = position_rhs(e, p, collision_tol);
    const auto grad = potential_gradient(e.coords, p, collision_tol);
    const auto force = forcing_term(e, p, collision_tol);
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t k = 0; k < rhs.size(); ++k) {
        const double d = rhs[k] - (-grad[k] + force[k]);
        diff += d * d;
        scale += rhs[k] * rhs[k];
    }
    return std::sqrt(diff) / std::max(1.0, std::sqrt(scale));
}

RunReport assess(const ScenarioSpec& spec, const Ensemble& e0, const Trajectory& traj, const CheckTolerances& tol) {
    const auto& p = spec.params;
    RunReport r;
    r.scenario = spec.name;
    r.bounds = bound_report(p, e0);

    const auto st = trajectory_stats(traj);
    auto& emp = r.empirical;
    emp.inf_d_min = st.inf_d_min;
    emp.sup_d_max = st.sup_d_max;
    emp.final_total_i = traj.diagnostics.back().total_i;
    emp.final_max_speed = traj.diagnostics.back().max_speed;
    emp.com_drift = st.com_drift;
    emp.max_simplex_drift = st.max_simplex_drift;
    emp.min_state_coord = st.min_state_coord;
    for (const auto& row : traj.diagnostics) emp.peak_mean_i = std::max(emp.peak_mean_i, row.mean_i);

    try {
        r.decay_fit = fit_exponential_rate(traj);
    } catch (const DegenerateWindowError&) {
        r.decay_fit.reset();
    }
    if (p.n == 2 && p.kappa2 > 0.0 && traj.size() >= 2) r.two_particle = classify_two_particle_run(traj, p);

    auto flag = [&](std::string name, bool ok) { r.pass_flags.emplace_back(std::move(name), ok); };

    flag("completed", true);
    flag("simplex_invariance",
         st.max_simplex_drift <= spec.sim.drift_tol && st.min_state_coord >= -spec.sim.drift_tol);
    double com0 = 0.0;
    for (double c : traj.diagnostics.front().com) com0 += c * c;
    flag("com_conservation", st.com_drift <= tol.com * (1.0 + std::sqrt(com0)));
    flag("monotonicity", st.max_s_increase <= tol.monotone && st.max_r_decrease <= tol.monotone);

    if (p.n >= 2) {
        flag("no_collision", st.inf_d_min > 0.0);
        if (r.bounds.delta_q) flag("diameter_floor", st.inf_d_max >= *r.bounds.delta_q - tol.diameter_floor);
        if (r.bounds.upper_bound_ok && r.bounds.diameter_ceiling)
            flag("diameter_ceiling", st.sup_d_max <= *r.bounds.diameter_ceiling + tol.diameter_ceiling);
        const double resid =
            std::max(gradient_identity_residual(e0, p, spec.sim.collision_tol),
                     gradient_identity_residual(traj.snapshots.back(), p, spec.sim.collision_tol));
        flag("gradient_identity", resid <= tol.gradient_identity);
    }

    if (r.bounds.lambda_rate) {
        const double lambda = *r.bounds.lambda_rate;
        const double n = static_cast<double>(p.n);
        bool ok = true;
        for (std::size_t k = 0; k < traj.size(); ++k)
            ok = ok && traj.diagnostics[k].total_i <= n * std::exp(-lambda * traj.times[k]);
        flag("decay_bound", ok);
    }
    return r;
}

RunOutcome run_scenario(const ScenarioSpec& spec, const CheckTolerances& tol) {
    validate(spec);
    const Ensemble e0 = initial_ensemble(spec);
    RunOutcome out;
    try {
        out.trajectory = simulate(e0, spec.params, spec.sim);
    } catch (const CollisionError& err) {
        out.report.failure = err.what();
    } catch (const DriftError& err) {
        out.report.failure = err.what();
    }
    if (out.trajectory) {
        out.report = assess(spec, e0, *out.trajectory, tol);
    } else {
        out.report.scenario = spec.name;
        out.report.bounds = bound_report(spec.params, e0);
        out.report.pass_flags.emplace_back("completed", false);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Command line
// ---------------------------------------------------------------------------

namespace {

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(' ');
        const auto last = item.find_last_not_of(' ');
        if (first == std::string::npos) throw ValidationError("empty entry in --" + what);
        item = item.substr(first, last - first + 1);
        double v = 0.0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (res.ec != std::errc{} || res.ptr != item.data() + item.size())
            throw ValidationError("--" + what + ": '" + item + "' is not a number");
        out.push_back(v);
    }
    if (out.empty()) throw ValidationError("--" + what + " needs at least one value");
    return out;
}

std::string preset_list() {
    std::string s;
    for (const auto& n : preset_names()) s += (s.empty() ? "" : ", ") + n;
    return s;
}

struct RunOptions {
    std::string preset;
    std::string scenario_path;
    std::string out_dir;
    std::optional<double> dt;
    std::optional<double> t_end;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> stride;
    std::string kappa2;
    std::string kappa3;
    std::size_t workers = 0;
    bool plot_data = false;
};

void write_outputs(const ScenarioSpec& spec, const RunOutcome& run, const std::filesystem::path& dir,
                   bool plot_data) {
    std::filesystem::create_directories(dir);
    save_scenario(spec, dir / "scenario.txt");
    write_report(run.report, dir / "report.txt");
    if (run.trajectory) {
        write_trajectory(*run.trajectory, dir / "trajectory.csv");
        write_diagnostics(*run.trajectory, dir / "diagnostics.csv");
        if (plot_data) write_plot_data(*run.trajectory, run.report.bounds.lambda_rate, dir / "plot.csv");
    }
}

void print_flags(const RunReport& r, std::ostream& out) {
    for (const auto& [name, ok] : r.pass_flags) out << "  " << (ok ? "PASS " : "FAIL ") << name << "\n";
    if (!r.failure.empty()) out << "  aborted: " << r.failure << "\n";
}

int do_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
    ScenarioSpec base;
    if (!opt.preset.empty() && !opt.scenario_path.empty()) {
        err << "error: --preset and --scenario are mutually exclusive\n";
        return 1;
    }
    if (!opt.preset.empty()) {
        try {
            base = preset(opt.preset);
        } catch (const std::out_of_range&) {
            err << "error: unknown preset '" << opt.preset << "'. Available presets: " << preset_list() << "\n";
            return 1;
        }
    } else if (!opt.scenario_path.empty()) {
        base = load_scenario(opt.scenario_path);
    } else {
        err << "error: one of --preset or --scenario is required. Available presets: " << preset_list() << "\n";
        return 1;
    }

    if (opt.dt) base.sim.dt = *opt.dt;
    if (opt.t_end) base.sim.t_end = *opt.t_end;
    if (opt.stride) base.sim.record_stride = *opt.stride;
    if (opt.seed) {
        auto* gen = std::get_if<GeneratorSpec>(&base.init);
        if (!gen) {
            err << "error: --seed requires a scenario with a generated initial configuration\n";
            return 1;
        }
        gen->seed = *opt.seed;
    }

    const auto k2s = opt.kappa2.empty() ? std::vector<double>{base.params.kappa2} : parse_list(opt.kappa2, "kappa2");
    const auto k3s = opt.kappa3.empty() ? std::vector<double>{base.params.kappa3} : parse_list(opt.kappa3, "kappa3");

    std::vector<ScenarioSpec> specs;
    for (double k2 : k2s) {
        for (double k3 : k3s) {
            ScenarioSpec s = base;
            s.params.kappa2 = k2;
            s.params.kappa3 = k3;
            validate(s);
            specs.push_back(std::move(s));
        }
    }
    const bool sweep = specs.size() > 1;

    std::vector<RunOutcome> results(specs.size());
    std::vector<std::string> failures(specs.size());
    const std::filesystem::path root = opt.out_dir;
    auto subdir = [&](const ScenarioSpec& s) {
        return sweep ? root / ("kappa2_" + format_double(s.params.kappa2) + "_kappa3_" + format_double(s.params.kappa3))
                     : root;
    };

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < specs.size(); k = next++) {
            try {
                results[k] = run_scenario(specs[k]);
                if (!opt.out_dir.empty()) write_outputs(specs[k], results[k], subdir(specs[k]), opt.plot_data);
            } catch (const std::exception& ex) {
                failures[k] = ex.what();
            }
        }
    };
    std::size_t workers = opt.workers ? opt.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, specs.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (std::size_t k = 0; k < specs.size(); ++k) {
        if (!failures[k].empty()) {
            err << "error: " << failures[k] << "\n";
            return 1;
        }
    }

    bool all_ok = true;
    for (const auto& r : results) all_ok = all_ok && r.report.all_passed();

    if (!sweep) {
        const auto& r = results.front().report;
        out << "scenario " << r.scenario << ": " << (r.all_passed() ? "all checks passed" : "CHECKS FAILED") << "\n";
        print_flags(r, out);
        if (r.bounds.lambda_rate) out << "  lambda = " << format_double(*r.bounds.lambda_rate) << "\n";
        if (r.decay_fit) out << "  fitted decay slope = " << format_double(r.decay_fit->slope) << "\n";
    } else {
        out << std::left << std::setw(10) << "kappa2" << std::setw(10) << "kappa3" << std::setw(12) << "ratio"
            << std::setw(16) << "peak_mean_I" << "status\n";
        std::ostringstream csv;
        csv << "kappa2,kappa3,ratio,peak_mean_I,final_total_I,all_passed\n";
        for (std::size_t k = 0; k < specs.size(); ++k) {
            const auto& p = specs[k].params;
            const auto& r = results[k].report;
            const double ratio = p.kappa2 > 0.0 ? p.kappa3 / p.kappa2 : INFINITY;
            out << std::left << std::setw(10) << format_double(p.kappa2) << std::setw(10) << format_double(p.kappa3)
                << std::setw(12) << format_double(ratio) << std::setw(16) << std::setprecision(6)
                << r.empirical.peak_mean_i << (r.all_passed() ? "ok" : "FAILED") << "\n";
            csv << format_double(p.kappa2) << ',' << format_double(p.kappa3) << ',' << format_double(ratio) << ','
                << format_double(r.empirical.peak_mean_i) << ',' << format_double(r.empirical.final_total_i) << ','
                << (r.all_passed() ? "true" : "false") << "\n";
            if (!r.all_passed()) {
                out << "  failures for kappa2 = " << format_double(p.kappa2)
                    << ", kappa3 = " << format_double(p.kappa3) << ":\n";
                print_flags(r, out);
            }
        }
        if (!opt.out_dir.empty()) {
            std::filesystem::create_directories(root);
            std::ofstream f(root / "summary.csv");
            f << csv.str();
            if (!f) throw Error("cannot write summary.csv in '" + root.string() + "'");
        }
    }
    return all_ok ? 0 : 2;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulate and verify the SIR-flock particle model", "sirflock"};
    app.require_subcommand(1);

    RunOptions opt;
    auto* run = app.add_subcommand("run", "Integrate a scenario, check every bound and write outputs");
    run->add_option("--preset", opt.preset, "Preset name (" + preset_list() + ")");
    run->add_option("--scenario", opt.scenario_path, "Scenario file path");
    run->add_option("--out", opt.out_dir, "Output directory");
    run->add_option("--dt", opt.dt, "Override the time step")->check(CLI::PositiveNumber);
    run->add_option("--t-end", opt.t_end, "Override the final time")->check(CLI::NonNegativeNumber);
    run->add_option("--seed", opt.seed, "Override the generator seed");
    run->add_option("--stride", opt.stride, "Override the record stride")->check(CLI::PositiveNumber);
    run->add_option("--kappa2", opt.kappa2, "Attraction coupling, or a comma-separated sweep list");
    run->add_option("--kappa3", opt.kappa3, "Repulsion coupling, or a comma-separated sweep list");
    run->add_option("--workers", opt.workers, "Concurrent sweep runs (default: hardware threads)");
    run->add_flag("--plot-data", opt.plot_data, "Also write plot.csv with log total infection and the decay bound");

    auto* presets = app.add_subcommand("presets", "List available presets");

    std::string show_name;
    auto* show = app.add_subcommand("show", "Print a preset as scenario text");
    show->add_option("name", show_name, "Preset name")->required();

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 1;
    }

    try {
        if (*presets) {
            for (const auto& n : preset_names()) out << n << "\n";
            return 0;
        }
        if (*show) {
            try {
                out << format_scenario(preset(show_name));
            } catch (const std::out_of_range&) {
                err << "error: unknown preset '" << show_name << "'. Available presets: " << preset_list() << "\n";
                return 1;
            }
            return 0;
        }
        return do_run(opt, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace sirflock
