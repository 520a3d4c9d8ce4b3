#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "sirflock/analysis.hpp"
#include "sirflock/integrator.hpp"
#include "sirflock/scenario.hpp"

namespace sirflock {

/// Tolerances applied by the per-run assertions.
struct CheckTolerances {
    double monotone = 1e-10;       ///< per-snapshot slack for S non-increasing, R non-decreasing
    double com = 1e-6;             ///< center-of-mass drift, scaled by (1 + |com(0)|)
    double diameter_floor = 1e-9;
    double diameter_ceiling = 1e-6;
    double gradient_identity = 1e-12;
};

struct EmpiricalSummary {
    double inf_d_min = 0.0;
    double sup_d_max = 0.0;
    double final_total_i = 0.0;
    double peak_mean_i = 0.0;
    double final_max_speed = 0.0;
    double com_drift = 0.0;
    double max_simplex_drift = 0.0;
    double min_state_coord = 0.0;
};

struct RunReport {
    std::string scenario;
    BoundReport bounds;
    std::optional<DecayFit> decay_fit;
    std::optional<TwoParticleClassification> two_particle;
    EmpiricalSummary empirical;
    std::vector<std::pair<std::string, bool>> pass_flags;
    std::string failure; ///< message of an aborted integration, empty otherwise

    bool all_passed() const;
};

struct RunOutcome {
    std::optional<Trajectory> trajectory; ///< absent when the integration aborted
    RunReport report;
};

/// Integrates a scenario and evaluates every bound and invariant on the result.
/// Collision and drift aborts are captured in the report, not thrown.
RunOutcome run_scenario(const ScenarioSpec& spec, const CheckTolerances& tol = {});

/// Evaluates the assertions on a finished trajectory.
RunReport assess(const ScenarioSpec& spec, const Ensemble& e0, const Trajectory& traj,
                 const CheckTolerances& tol = {});

/// ||position_rhs - (-grad V + f)|| / max(1, ||position_rhs||) at one phase point.
double gradient_identity_residual(const Ensemble& e, const ModelParams& p, double collision_tol);

/// Command-line entry point. Exit codes: 0 all assertions passed, 1 usage or
/// parse error, 2 an invariant assertion failed.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sirflock
