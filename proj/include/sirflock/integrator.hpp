#pragma once

#include <cstddef>
#include <vector>

#include "sirflock/types.hpp"

namespace sirflock {

struct SimulationConfig {
    double dt = 1e-3;
    double t_end = 30.0;
    std::size_t record_stride = 1;
    double collision_tol = kDefaultCollisionTol;
    double drift_tol = 1e-7;

    bool operator==(const SimulationConfig&) const = default;
};

/// Throws ValidationError on dt <= 0, t_end < 0, stride == 0 or non-positive tolerances.
void validate(const SimulationConfig& cfg);

/// Fixed-step time grid on [0, t_end]. The last step is shortened to land
/// exactly on t_end; step k ends at k * dt (no accumulated sums).
class StepSchedule {
public:
    StepSchedule(double dt, double t_end);

    std::size_t steps() const noexcept { return steps_; }
    /// Time at the end of step k (1-based); time_after(0) == 0.
    double time_after(std::size_t k) const noexcept;
    /// Size of step k (1-based).
    double step_size(std::size_t k) const noexcept;

private:
    double dt_;
    double t_end_;
    std::size_t full_steps_;
    std::size_t steps_;
};

struct DiagnosticsRow {
    double d_min = 0.0;
    double d_max = 0.0;
    double total_i = 0.0;
    double mean_i = 0.0;
    std::vector<double> com;
    double max_speed = 0.0;
};

/// Snapshot statistics. For N == 1 both distances are reported as 0.
DiagnosticsRow diagnose(const Ensemble& e, const ModelParams& p, double collision_tol = kDefaultCollisionTol);

struct Trajectory {
    std::vector<double> times;
    std::vector<Ensemble> snapshots;
    std::vector<DiagnosticsRow> diagnostics;

    std::size_t size() const noexcept { return times.size(); }
};

/// One classical four-stage RK4 step of the full system. No renormalisation.
/// Every stage evaluation is collision-guarded.
Ensemble rk4_step(const Ensemble& e, const ModelParams& p, double dt, double collision_tol = kDefaultCollisionTol);

/// Integrates from t = 0 to cfg.t_end, recording every record_stride steps
/// plus the final state. Throws CollisionError (with time) or DriftError.
Trajectory simulate(const Ensemble& e0, const ModelParams& p, const SimulationConfig& cfg);

/// Zero-based indices i with s_i * I_i >= c.
std::vector<std::size_t> confirmed_set(const Ensemble& e, const ModelParams& p);

} // namespace sirflock
