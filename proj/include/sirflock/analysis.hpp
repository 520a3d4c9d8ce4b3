#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sirflock/integrator.hpp"
#include "sirflock/types.hpp"

namespace sirflock {

// ---------------------------------------------------------------------------
// Epidemic decay bounds
// ---------------------------------------------------------------------------

/// min_i b^i - kappa1 (N - 1) / L^gamma when strictly positive, otherwise empty.
std::optional<double> decay_rate_lambda(const ModelParams& p);

/// min_i b^i > kappa1 L^-gamma * max_i sum_{j != i} S_j(0).
bool relaxed_decay_ok(const ModelParams& p, const Ensemble& e0);

// ---------------------------------------------------------------------------
// Distance bounds
// ---------------------------------------------------------------------------

/// min{D(0), (kappa3 m_r / (kappa2 M_a))^(1/(beta - alpha))}. Throws when kappa2 == 0.
double delta_q_bound(const ModelParams& p, double d_max_0);

/// Natural log of the diameter-ceiling gate constant. Q = N(N-1)/2:
///
///   Q [ -ln 2 + ln max{D1(0), 1} + max{ln(m_r / 2M_a) / (beta - alpha), 0} ]
///     + Q / (beta - 1) * ln(m_r / (2N (M_a + M_r)))
///
/// The raw value underflows for moderate N, so comparisons stay in log space.
double log_capital_lambda(const ModelParams& p, double d1_0);

/// exp(log_capital_lambda); may underflow to 0.
double capital_lambda(const ModelParams& p, double d1_0);

/// Which exponent the diameter-ceiling gate raises (kappa3 M_r / (kappa2 m_a)) to.
enum class GateExponent {
    BetaMinusAlpha,           ///< (.)^(beta - alpha), the stated form of the gate
    ReciprocalBetaMinusAlpha, ///< (.)^(1/(beta - alpha)), the root of f(d) = 0
};

/// Lambda > (kappa3 M_r / (kappa2 m_a))^e for the chosen exponent reading.
bool upper_bound_gate(const ModelParams& p, double d1_0, GateExponent reading = GateExponent::BetaMinusAlpha);

/// Sup bound for y' <= -a y^-p + b y^-q: max{y0, (b/a)^(1/(q-p))}.
/// Requires a > 0, b > 0, 0 <= p < q, y0 > 0.
double ode_sup_bound(double a, double b, double p, double q, double y0);

/// Diameter ceiling max{D(0), (kappa3 M_r / (kappa2 m_a))^(1/(beta-alpha))} obtained from
/// ode_sup_bound with a = 2 kappa2 m_a / N, b = 2 kappa3 M_r / N, p = alpha - 1, q = beta - 1.
double diameter_ceiling(const ModelParams& p, double d_max_0);

// ---------------------------------------------------------------------------
// Two-particle reduction
// ---------------------------------------------------------------------------

/// (kappa3 eps_r / (kappa2 (1 + eps_a)))^(1/(beta - alpha)). Throws when kappa2 == 0.
double two_particle_equilibrium(const ModelParams& p);

/// min_i b^i > 2 kappa1 / (x_inf + L)^gamma.
bool two_particle_b_ok(const ModelParams& p);

enum class TwoParticleCase {
    ExponentialDecay,       ///< recovery dominates the linearised transmission at (0, 0)
    BoundedTotalInfection,  ///< otherwise; the integral of I1 + I2 is bounded
};

struct TwoParticleClassification {
    TwoParticleCase which = TwoParticleCase::ExponentialDecay;
    double integral_i1 = 0.0;
    double integral_i2 = 0.0;
    double threshold = 0.0; ///< kappa1 / (x_inf + L)^gamma * sqrt((1 - b int I1)(1 - b int I2))
};

/// Post-hoc classification of a finished N == 2 run, using trapezoidal integrals
/// of I1 and I2 over the recorded snapshots.
TwoParticleClassification classify_two_particle_run(const Trajectory& traj, const ModelParams& p);

// ---------------------------------------------------------------------------
// Gradient-flow decomposition
// ---------------------------------------------------------------------------

/// Disease-free pair potential, each unordered pair counted once:
///
///   V = kappa2/N sum_{i<j} (1+eps_a) phi_alpha(r_ij) - kappa3/N sum_{i<j} eps_r phi_beta(r_ij)
///
/// with phi_e(r) = r^(2-e)/(2-e) for e != 2 and ln r for e == 2. `coords` is
/// row-major with dimension p.d.
double potential_value(std::span<const double> coords, const ModelParams& p,
                       double collision_tol = kDefaultCollisionTol);

/// Analytic gradient of potential_value, row-major.
std::vector<double> potential_gradient(std::span<const double> coords, const ModelParams& p,
                                       double collision_tol = kDefaultCollisionTol);

/// Residual force from the weights' deviation from their disease-free values:
/// position_rhs == -potential_gradient + forcing_term.
std::vector<double> forcing_term(const Ensemble& e, const ModelParams& p, double collision_tol = kDefaultCollisionTol);

// ---------------------------------------------------------------------------
// Classical three-state SIR
// ---------------------------------------------------------------------------

EpidemicState classical_sir_step(const EpidemicState& w, double a, double b, double dt);

struct ClassicalSirSeries {
    std::vector<double> times;
    std::vector<EpidemicState> states;
};

/// RK4 solution on the same step schedule and record stride as `simulate`.
ClassicalSirSeries classical_sir_solve(double a, double b, const EpidemicState& w0, const SimulationConfig& cfg);

// ---------------------------------------------------------------------------
// Distances and fits
// ---------------------------------------------------------------------------

/// All N(N-1)/2 pairwise distances, ascending.
std::vector<double> ordered_distances(const Ensemble& e);

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double window_start = 0.0;
    double window_end = 0.0;
    double residual = 0.0; ///< RMS of the log residuals
    std::size_t samples = 0;
};

/// Least-squares line through (t, ln v) for samples with t in [t0, t1].
/// Throws DegenerateWindowError with fewer than 3 samples or any v <= 0.
DecayFit fit_log_linear(std::span<const double> times, std::span<const double> values, double t0, double t1);

/// Fit of ln(total infection) over [t0, t1].
DecayFit fit_exponential_rate(const Trajectory& traj, double t0, double t1);

/// Same, over the last `fraction` of the run (default: the last 60%).
DecayFit fit_exponential_rate(const Trajectory& traj, double fraction = 0.6);

// ---------------------------------------------------------------------------
// Trajectory checks
// ---------------------------------------------------------------------------

struct TrajectoryStats {
    double max_simplex_drift = 0.0;   ///< max |S + I + R - 1|
    double min_state_coord = 0.0;     ///< min over S, I, R
    double com_drift = 0.0;           ///< max ||com(t) - com(0)||
    double max_s_increase = 0.0;      ///< largest snapshot-to-snapshot increase of any S_i
    double max_r_decrease = 0.0;      ///< largest snapshot-to-snapshot decrease of any R_i
    double inf_d_min = 0.0;
    double sup_d_max = 0.0;
    double inf_d_max = 0.0;
};

TrajectoryStats trajectory_stats(const Trajectory& traj);

struct BoundReport {
    std::optional<double> lambda_rate;
    bool lambda_relaxed_ok = false;
    std::optional<double> delta_q;       ///< absent when kappa2 == 0
    double log_capital_lambda = 0.0;
    double capital_lambda = 0.0;
    bool upper_bound_ok = false;         ///< gate with exponent beta - alpha
    bool upper_bound_ok_reciprocal = false; ///< gate with exponent 1/(beta - alpha)
    std::optional<double> diameter_ceiling; ///< absent when kappa2 == 0 or kappa3 == 0
    std::optional<double> x_infinity;    ///< absent when kappa2 == 0
    std::optional<bool> two_particle_b_ok;
};

/// Evaluates every constant for the given parameters and initial configuration (N >= 2).
BoundReport bound_report(const ModelParams& p, const Ensemble& e0);

} // namespace sirflock
