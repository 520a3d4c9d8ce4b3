#include "sirflock/output.hpp"

#include <cmath>
#include <fstream>

#include "sirflock/errors.hpp"
#include "sirflock/runner.hpp"
#include "sirflock/scenario.hpp"

namespace sirflock {

namespace {

template <typename Writer>
void to_file(const std::filesystem::path& path, Writer&& write) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    write(out);
    out.flush();
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

const char* yes_no(bool b) { return b ? "true" : "false"; }

template <typename T>
std::string maybe(const std::optional<T>& v) {
    if (!v) return "absent";
    if constexpr (std::is_same_v<T, bool>) {
        return yes_no(*v);
    } else {
        return format_double(*v);
    }
}

} // namespace

void write_trajectory(const Trajectory& traj, std::ostream& out) {
    const std::size_t dim = traj.snapshots.empty() ? 0 : traj.snapshots.front().dim;
    out << "t,particle,S,I,R";
    for (std::size_t k = 1; k <= dim; ++k) out << ",x" << k;
    out << "\n";
    for (std::size_t s = 0; s < traj.size(); ++s) {
        const auto& e = traj.snapshots[s];
        const std::string t = format_double(traj.times[s]);
        for (std::size_t i = 0; i < e.size(); ++i) {
            const auto& w = e.states[i];
            out << t << ',' << i << ',' << format_double(w.s) << ',' << format_double(w.i) << ','
                << format_double(w.r);
            for (double c : e.position(i)) out << ',' << format_double(c);
            out << "\n";
        }
    }
}

void write_diagnostics(const Trajectory& traj, std::ostream& out) {
    const std::size_t dim = traj.diagnostics.empty() ? 0 : traj.diagnostics.front().com.size();
    out << "t,d_min,d_max,total_I,mean_I";
    for (std::size_t k = 1; k <= dim; ++k) out << ",com_" << k;
    out << ",max_speed\n";
    for (std::size_t s = 0; s < traj.size(); ++s) {
        const auto& row = traj.diagnostics[s];
        out << format_double(traj.times[s]) << ',' << format_double(row.d_min) << ',' << format_double(row.d_max)
            << ',' << format_double(row.total_i) << ',' << format_double(row.mean_i);
        for (double c : row.com) out << ',' << format_double(c);
        out << ',' << format_double(row.max_speed) << "\n";
    }
}

void write_plot_data(const Trajectory& traj, std::optional<double> lambda, std::ostream& out) {
    const double n = traj.snapshots.empty() ? 1.0 : static_cast<double>(traj.snapshots.front().size());
    out << "t,log_total_I,minus_lambda_t,log_bound\n";
    for (std::size_t s = 0; s < traj.size(); ++s) {
        const double t = traj.times[s];
        const double total = traj.diagnostics[s].total_i;
        const double log_total = total > 0.0 ? std::log(total) : -HUGE_VAL;
        const double ref = lambda ? -*lambda * t : NAN;
        const double bound = lambda ? std::log(n) - *lambda * t : NAN;
        out << format_double(t) << ',' << format_double(log_total) << ',' << format_double(ref) << ','
            << format_double(bound) << "\n";
    }
}

void write_report(const RunReport& r, std::ostream& out) {
    const auto& b = r.bounds;
    out << "format_version = 1\n";
    out << "scenario = " << r.scenario << "\n\n";

    out << "[bounds]\n";
    out << "lambda_rate = " << maybe(b.lambda_rate) << "\n";
    out << "lambda_relaxed_ok = " << yes_no(b.lambda_relaxed_ok) << "\n";
    out << "delta_q = " << maybe(b.delta_q) << "\n";
    out << "capital_lambda = " << format_double(b.capital_lambda) << "\n";
    out << "log_capital_lambda = " << format_double(b.log_capital_lambda) << "\n";
    out << "capital_lambda_reading = four-factor; source formula typographically uncertain\n";
    out << "upper_bound_ok = " << yes_no(b.upper_bound_ok) << "\n";
    out << "upper_bound_ok_reciprocal = " << yes_no(b.upper_bound_ok_reciprocal) << "\n";
    out << "diameter_ceiling = " << maybe(b.diameter_ceiling) << "\n";
    out << "x_infinity = " << maybe(b.x_infinity) << "\n";
    out << "two_particle_b_ok = " << maybe(b.two_particle_b_ok) << "\n\n";

    out << "[decay_fit]\n";
    if (r.decay_fit) {
        const auto& f = *r.decay_fit;
        out << "slope = " << format_double(f.slope) << "\n";
        out << "intercept = " << format_double(f.intercept) << "\n";
        out << "window_start = " << format_double(f.window_start) << "\n";
        out << "window_end = " << format_double(f.window_end) << "\n";
        out << "residual = " << format_double(f.residual) << "\n";
        out << "samples = " << f.samples << "\n\n";
    } else {
        out << "status = absent\n\n";
    }

    if (r.two_particle) {
        const auto& c = *r.two_particle;
        out << "[two_particle]\n";
        out << "case = "
            << (c.which == TwoParticleCase::ExponentialDecay ? "exponential_decay" : "bounded_total_infection")
            << "\n";
        out << "integral_i1 = " << format_double(c.integral_i1) << "\n";
        out << "integral_i2 = " << format_double(c.integral_i2) << "\n";
        out << "threshold = " << format_double(c.threshold) << "\n\n";
    }

    const auto& e = r.empirical;
    out << "[empirical]\n";
    out << "inf_d_min = " << format_double(e.inf_d_min) << "\n";
    out << "sup_d_max = " << format_double(e.sup_d_max) << "\n";
    out << "final_total_i = " << format_double(e.final_total_i) << "\n";
    out << "peak_mean_i = " << format_double(e.peak_mean_i) << "\n";
    out << "final_max_speed = " << format_double(e.final_max_speed) << "\n";
    out << "com_drift = " << format_double(e.com_drift) << "\n";
    out << "max_simplex_drift = " << format_double(e.max_simplex_drift) << "\n";
    out << "min_state_coord = " << format_double(e.min_state_coord) << "\n\n";

    out << "[pass_flags]\n";
    for (const auto& [name, ok] : r.pass_flags) out << name << " = " << yes_no(ok) << "\n";
    out << "\n[result]\n";
    out << "all_passed = " << yes_no(r.all_passed()) << "\n";
    if (!r.failure.empty()) out << "failure = " << r.failure << "\n";
}

void write_trajectory(const Trajectory& traj, const std::filesystem::path& path) {
    to_file(path, [&](std::ostream& out) { write_trajectory(traj, out); });
}

void write_diagnostics(const Trajectory& traj, const std::filesystem::path& path) {
    to_file(path, [&](std::ostream& out) { write_diagnostics(traj, out); });
}

void write_plot_data(const Trajectory& traj, std::optional<double> lambda, const std::filesystem::path& path) {
    to_file(path, [&](std::ostream& out) { write_plot_data(traj, lambda, out); });
}

void write_report(const RunReport& report, const std::filesystem::path& path) {
    to_file(path, [&](std::ostream& out) { write_report(report, out); });
}

} // namespace sirflock
