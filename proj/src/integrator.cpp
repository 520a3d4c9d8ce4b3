#include "sirflock/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sirflock/errors.hpp"
#include "sirflock/model.hpp"

namespace sirflock {

void validate(const SimulationConfig& cfg) {
    if (!(std::isfinite(cfg.dt) && cfg.dt > 0.0)) throw ValidationError("time step dt must be > 0");
    if (!(std::isfinite(cfg.t_end) && cfg.t_end >= 0.0)) throw ValidationError("t_end must be >= 0");
    if (cfg.record_stride < 1) throw ValidationError("record_stride must be >= 1");
    if (!(cfg.collision_tol > 0.0)) throw ValidationError("collision_tol must be > 0");
    if (!(cfg.drift_tol > 0.0)) throw ValidationError("drift_tol must be > 0");
}

StepSchedule::StepSchedule(double dt, double t_end) : dt_(dt), t_end_(t_end) {
    const double q = t_end / dt;
    const double nearest = std::round(q);
    if (std::abs(q - nearest) <= 1e-9 * std::max(1.0, q)) {
        full_steps_ = static_cast<std::size_t>(nearest);
        steps_ = full_steps_;
    } else {
        full_steps_ = static_cast<std::size_t>(std::floor(q));
        steps_ = full_steps_ + 1;
    }
}

double StepSchedule::time_after(std::size_t k) const noexcept {
    if (k == 0) return 0.0;
    if (k >= steps_) return t_end_;
    return static_cast<double>(k) * dt_;
}

double StepSchedule::step_size(std::size_t k) const noexcept {
    if (k <= full_steps_) return dt_;
    return t_end_ - static_cast<double>(full_steps_) * dt_;
}

DiagnosticsRow diagnose(const Ensemble& e, const ModelParams& p, double collision_tol) {
    DiagnosticsRow row;
    const std::size_t n = e.size();
    const std::size_t dim = e.dim;

    if (n >= 2) {
        row.d_min = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double r = distance(e.position(i), e.position(j));
                row.d_min = std::min(row.d_min, r);
                row.d_max = std::max(row.d_max, r);
            }
        }
    }

    row.com.assign(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        row.total_i += e.states[i].i;
        for (std::size_t k = 0; k < dim; ++k) row.com[k] += e.coords[i * dim + k];
    }
    if (n > 0) {
        row.mean_i = row.total_i / static_cast<double>(n);
        for (auto& c : row.com) c /= static_cast<double>(n);
    }

    const auto velocity = position_rhs(e, p, collision_tol);
    for (std::size_t i = 0; i < n; ++i) {
        double sq = 0.0;
        for (std::size_t k = 0; k < dim; ++k) sq += velocity[i * dim + k] * velocity[i * dim + k];
        row.max_speed = std::max(row.max_speed, std::sqrt(sq));
    }
    return row;
}

namespace {

// base + h * k
Ensemble advance(const Ensemble& base, const PhaseDerivative& k, double h) {
    Ensemble out = base;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.states[i].s += h * k.rates[i].ds;
        out.states[i].i += h * k.rates[i].di;
        out.states[i].r += h * k.rates[i].dr;
    }
    for (std::size_t c = 0; c < out.coords.size(); ++c) out.coords[c] += h * k.velocity[c];
    return out;
}

void check_drift(const Ensemble& e, double tol, double t) {
    for (std::size_t i = 0; i < e.size(); ++i) {
        const auto& w = e.states[i];
        const double off = std::abs(w.total() - 1.0);
        if (!(off <= tol)) throw DriftError(i, off, t);
        const double lowest = std::min({w.s, w.i, w.r});
        if (lowest < -tol) throw DriftError(i, -lowest, t);
    }
}

} // namespace

Ensemble rk4_step(const Ensemble& e, const ModelParams& p, double dt, double collision_tol) {
    const auto k1 = full_rhs(e, p, collision_tol);
    const auto k2 = full_rhs(advance(e, k1, 0.5 * dt), p, collision_tol);
    const auto k3 = full_rhs(advance(e, k2, 0.5 * dt), p, collision_tol);
    const auto k4 = full_rhs(advance(e, k3, dt), p, collision_tol);

    const double w = dt / 6.0;
    Ensemble out = e;
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto& st = out.states[i];
        st.s += w * (k1.rates[i].ds + 2.0 * k2.rates[i].ds + 2.0 * k3.rates[i].ds + k4.rates[i].ds);
        st.i += w * (k1.rates[i].di + 2.0 * k2.rates[i].di + 2.0 * k3.rates[i].di + k4.rates[i].di);
        st.r += w * (k1.rates[i].dr + 2.0 * k2.rates[i].dr + 2.0 * k3.rates[i].dr + k4.rates[i].dr);
    }
    for (std::size_t c = 0; c < out.coords.size(); ++c) {
        out.coords[c] += w * (k1.velocity[c] + 2.0 * k2.velocity[c] + 2.0 * k3.velocity[c] + k4.velocity[c]);
    }
    return out;
}

Trajectory simulate(const Ensemble& e0, const ModelParams& p, const SimulationConfig& cfg) {
    validate(p);
    validate(cfg);
    validate(e0, p, cfg.collision_tol);

    const StepSchedule schedule(cfg.dt, cfg.t_end);
    Trajectory traj;
    auto record = [&](const Ensemble& e, double t) {
        try {
            traj.diagnostics.push_back(diagnose(e, p, cfg.collision_tol));
        } catch (const CollisionError& err) {
            throw err.at_time(t);
        }
        traj.times.push_back(t);
        traj.snapshots.push_back(e);
    };

    record(e0, 0.0);
    Ensemble state = e0;
    for (std::size_t k = 1; k <= schedule.steps(); ++k) {
        const double t_prev = schedule.time_after(k - 1);
        try {
            state = rk4_step(state, p, schedule.step_size(k), cfg.collision_tol);
        } catch (const CollisionError& err) {
            throw err.at_time(t_prev);
        }
        const double t = schedule.time_after(k);
        check_drift(state, cfg.drift_tol, t);
        if (k % cfg.record_stride == 0 || k == schedule.steps()) record(state, t);
    }
    return traj;
}

std::vector<std::size_t> confirmed_set(const Ensemble& e, const ModelParams& p) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (p.symptom[i] * e.states[i].i >= p.confirm_threshold) out.push_back(i);
    }
    return out;
}

} // namespace sirflock
