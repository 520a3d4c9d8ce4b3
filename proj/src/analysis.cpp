#include "sirflock/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sirflock/errors.hpp"
#include "sirflock/model.hpp"

namespace sirflock {

using detail::power;

std::optional<double> decay_rate_lambda(const ModelParams& p) {
    const double coupling = p.kappa1 * static_cast<double>(p.n - 1) / power(p.l_offset, p.gamma_exp);
    const double lambda = p.min_recovery() - coupling;
    if (lambda > 0.0) return lambda;
    return std::nullopt;
}

bool relaxed_decay_ok(const ModelParams& p, const Ensemble& e0) {
    double total_s = 0.0;
    for (const auto& w : e0.states) total_s += w.s;
    double worst = 0.0;
    for (const auto& w : e0.states) worst = std::max(worst, total_s - w.s);
    return p.min_recovery() > p.kappa1 / power(p.l_offset, p.gamma_exp) * worst;
}

double delta_q_bound(const ModelParams& p, double d_max_0) {
    if (!(p.kappa2 > 0.0)) throw InvalidParameterError("delta_Q is undefined for kappa2 == 0");
    const double base = p.kappa3 * p.m_r() / (p.kappa2 * p.big_m_a());
    return std::min(d_max_0, std::pow(base, 1.0 / (p.beta - p.alpha)));
}

double log_capital_lambda(const ModelParams& p, double d1_0) {
    const double n = static_cast<double>(p.n);
    const double q = n * (n - 1.0) / 2.0;
    const double spread = std::max(std::log(p.m_r() / (2.0 * p.big_m_a())) / (p.beta - p.alpha), 0.0);
    const double per_pair = -std::log(2.0) + std::log(std::max(d1_0, 1.0)) + spread;
    const double tail = std::log(p.m_r() / (2.0 * n * (p.big_m_a() + p.big_m_r()))) / (p.beta - 1.0);
    return q * per_pair + q * tail;
}

double capital_lambda(const ModelParams& p, double d1_0) {
    return std::exp(log_capital_lambda(p, d1_0));
}

bool upper_bound_gate(const ModelParams& p, double d1_0, GateExponent reading) {
    if (!(p.kappa2 > 0.0)) return false;
    if (!(p.kappa3 > 0.0)) return true; // no repulsion: the ratio is 0
    const double log_ratio = std::log(p.kappa3 * p.big_m_r() / (p.kappa2 * p.m_a()));
    const double exponent =
        reading == GateExponent::BetaMinusAlpha ? p.beta - p.alpha : 1.0 / (p.beta - p.alpha);
    return log_capital_lambda(p, d1_0) > exponent * log_ratio;
}

double ode_sup_bound(double a, double b, double p, double q, double y0) {
    if (!(a > 0.0)) throw InvalidParameterError("ode_sup_bound requires a > 0");
    if (!(b > 0.0)) throw InvalidParameterError("ode_sup_bound requires b > 0");
    if (!(p >= 0.0 && p < q)) throw InvalidParameterError("ode_sup_bound requires 0 <= p < q");
    if (!(y0 > 0.0)) throw InvalidParameterError("ode_sup_bound requires y0 > 0");
    const double y_star = std::pow(b / a, 1.0 / (q - p));
    return std::max(y0, y_star);
}

double diameter_ceiling(const ModelParams& p, double d_max_0) {
    const double n = static_cast<double>(p.n);
    return ode_sup_bound(2.0 * p.kappa2 * p.m_a() / n, 2.0 * p.kappa3 * p.big_m_r() / n, p.alpha - 1.0,
                         p.beta - 1.0, d_max_0);
}

double two_particle_equilibrium(const ModelParams& p) {
    if (!(p.kappa2 > 0.0)) throw InvalidParameterError("two-particle equilibrium is undefined for kappa2 == 0");
    return std::pow(p.kappa3 * p.eps_r / (p.kappa2 * (1.0 + p.eps_a)), 1.0 / (p.beta - p.alpha));
}

bool two_particle_b_ok(const ModelParams& p) {
    const double x_inf = two_particle_equilibrium(p);
    return p.min_recovery() > 2.0 * p.kappa1 / power(x_inf + p.l_offset, p.gamma_exp);
}

TwoParticleClassification classify_two_particle_run(const Trajectory& traj, const ModelParams& p) {
    if (p.n != 2) throw ValidationError("two-particle classification requires n == 2");
    if (traj.size() < 2) throw DegenerateWindowError("two-particle classification needs at least 2 snapshots");
    TwoParticleClassification out;
    for (std::size_t k = 1; k < traj.size(); ++k) {
        const double h = traj.times[k] - traj.times[k - 1];
        const auto& a = traj.snapshots[k - 1].states;
        const auto& b = traj.snapshots[k].states;
        out.integral_i1 += 0.5 * h * (a[0].i + b[0].i);
        out.integral_i2 += 0.5 * h * (a[1].i + b[1].i);
    }
    const double rate = p.min_recovery();
    const double x_inf = two_particle_equilibrium(p);
    const double product = std::max(0.0, (1.0 - rate * out.integral_i1) * (1.0 - rate * out.integral_i2));
    out.threshold = p.kappa1 / power(x_inf + p.l_offset, p.gamma_exp) * std::sqrt(product);
    out.which = rate > out.threshold ? TwoParticleCase::ExponentialDecay : TwoParticleCase::BoundedTotalInfection;
    return out;
}

namespace {

double pair_potential(double r, double exponent) {
    if (exponent == 2.0) return std::log(r);
    return power(r, 2.0 - exponent) / (2.0 - exponent);
}

template <typename PairFn>
void for_each_pair(std::span<const double> coords, std::size_t dim, double collision_tol, PairFn&& fn) {
    const std::size_t n = coords.size() / dim;
    for (std::size_t i = 0; i < n; ++i) {
        const auto xi = coords.subspan(i * dim, dim);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto xj = coords.subspan(j * dim, dim);
            const double r = distance(xi, xj);
            if (r < collision_tol) throw CollisionError(i, j, r);
            fn(i, j, r);
        }
    }
}

} // namespace

double potential_value(std::span<const double> coords, const ModelParams& p, double collision_tol) {
    const double n = static_cast<double>(p.n);
    const double wa = p.kappa2 / n * (1.0 + p.eps_a);
    const double wr = p.kappa3 / n * p.eps_r;
    double v = 0.0;
    for_each_pair(coords, p.d, collision_tol, [&](std::size_t, std::size_t, double r) {
        v += wa * pair_potential(r, p.alpha) - wr * pair_potential(r, p.beta);
    });
    return v;
}

std::vector<double> potential_gradient(std::span<const double> coords, const ModelParams& p, double collision_tol) {
    const std::size_t dim = p.d;
    const double n = static_cast<double>(p.n);
    const double wa = p.kappa2 / n * (1.0 + p.eps_a);
    const double wr = p.kappa3 / n * p.eps_r;
    std::vector<double> grad(coords.size(), 0.0);
    for_each_pair(coords, dim, collision_tol, [&](std::size_t i, std::size_t j, double r) {
        // d/dx_i of phi_e(|x_i - x_j|) = r^-e (x_i - x_j)
        const double c = wa / power(r, p.alpha) - wr / power(r, p.beta);
        for (std::size_t k = 0; k < dim; ++k) {
            const double g = c * (coords[i * dim + k] - coords[j * dim + k]);
            grad[i * dim + k] += g;
            grad[j * dim + k] -= g;
        }
    });
    return grad;
}

std::vector<double> forcing_term(const Ensemble& e, const ModelParams& p, double collision_tol) {
    const std::size_t dim = e.dim;
    const double n = static_cast<double>(p.n);
    const double ka = p.kappa2 / n;
    const double kr = p.kappa3 / n;
    std::vector<double> force(e.coords.size(), 0.0);
    for_each_pair(e.coords, dim, collision_tol, [&](std::size_t i, std::size_t j, double r) {
        const double ii = e.states[i].i;
        const double ij = e.states[j].i;
        const double attract_dev = 2.0 * ii * ij - ii - ij; // Psi_a - (1 + eps_a)
        const double repulse_dev = ii + ij - 2.0 * ii * ij; // Psi_r - eps_r
        const double c = ka * attract_dev / power(r, p.alpha) - kr * repulse_dev / power(r, p.beta);
        for (std::size_t k = 0; k < dim; ++k) {
            const double f = c * (e.coords[j * dim + k] - e.coords[i * dim + k]);
            force[i * dim + k] += f;
            force[j * dim + k] -= f;
        }
    });
    return force;
}

EpidemicState classical_sir_step(const EpidemicState& w, double a, double b, double dt) {
    auto rhs = [a, b](const EpidemicState& x) {
        EpidemicState d;
        d.s = -a * x.s * x.i;
        d.r = b * x.i;
        d.i = -(d.s + d.r);
        return d;
    };
    auto shifted = [](const EpidemicState& x, const EpidemicState& k, double h) {
        return EpidemicState{x.s + h * k.s, x.i + h * k.i, x.r + h * k.r};
    };
    const auto k1 = rhs(w);
    const auto k2 = rhs(shifted(w, k1, 0.5 * dt));
    const auto k3 = rhs(shifted(w, k2, 0.5 * dt));
    const auto k4 = rhs(shifted(w, k3, dt));
    const double h = dt / 6.0;
    return {w.s + h * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s), w.i + h * (k1.i + 2.0 * k2.i + 2.0 * k3.i + k4.i),
            w.r + h * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r)};
}

ClassicalSirSeries classical_sir_solve(double a, double b, const EpidemicState& w0, const SimulationConfig& cfg) {
    validate(cfg);
    if (!on_simplex(w0)) throw ValidationError("classical SIR initial state off the probability simplex");
    const StepSchedule schedule(cfg.dt, cfg.t_end);
    ClassicalSirSeries out;
    out.times.push_back(0.0);
    out.states.push_back(w0);
    EpidemicState w = w0;
    for (std::size_t k = 1; k <= schedule.steps(); ++k) {
        w = classical_sir_step(w, a, b, schedule.step_size(k));
        if (k % cfg.record_stride == 0 || k == schedule.steps()) {
            out.times.push_back(schedule.time_after(k));
            out.states.push_back(w);
        }
    }
    return out;
}

std::vector<double> ordered_distances(const Ensemble& e) {
    std::vector<double> out;
    out.reserve(e.size() * (e.size() - (e.size() > 0 ? 1 : 0)) / 2);
    for (std::size_t i = 0; i < e.size(); ++i) {
        for (std::size_t j = i + 1; j < e.size(); ++j) out.push_back(distance(e.position(i), e.position(j)));
    }
    std::sort(out.begin(), out.end());
    return out;
}

DecayFit fit_log_linear(std::span<const double> times, std::span<const double> values, double t0, double t1) {
    if (times.size() != values.size()) throw DegenerateWindowError("times and values differ in length");
    std::vector<double> ts;
    std::vector<double> ys;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] < t0 || times[k] > t1) continue;
        if (!(values[k] > 0.0)) throw DegenerateWindowError("non-positive value inside the fit window");
        ts.push_back(times[k]);
        ys.push_back(std::log(values[k]));
    }
    if (ts.size() < 3) throw DegenerateWindowError("fit window holds fewer than 3 samples");

    const double m = static_cast<double>(ts.size());
    const double t_mean = std::accumulate(ts.begin(), ts.end(), 0.0) / m;
    const double y_mean = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
    double stt = 0.0;
    double sty = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        stt += (ts[k] - t_mean) * (ts[k] - t_mean);
        sty += (ts[k] - t_mean) * (ys[k] - y_mean);
    }
    if (!(stt > 0.0)) throw DegenerateWindowError("fit window has zero time spread");

    DecayFit fit;
    fit.slope = sty / stt;
    fit.intercept = y_mean - fit.slope * t_mean;
    fit.window_start = ts.front();
    fit.window_end = ts.back();
    fit.samples = ts.size();
    double ss = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double res = ys[k] - (fit.intercept + fit.slope * ts[k]);
        ss += res * res;
    }
    fit.residual = std::sqrt(ss / m);
    return fit;
}

DecayFit fit_exponential_rate(const Trajectory& traj, double t0, double t1) {
    std::vector<double> totals;
    totals.reserve(traj.size());
    for (const auto& row : traj.diagnostics) totals.push_back(row.total_i);
    return fit_log_linear(traj.times, totals, t0, t1);
}

DecayFit fit_exponential_rate(const Trajectory& traj, double fraction) {
    if (traj.size() == 0) throw DegenerateWindowError("empty trajectory");
    const double t_first = traj.times.front();
    const double t_last = traj.times.back();
    return fit_exponential_rate(traj, t_last - fraction * (t_last - t_first), t_last);
}

TrajectoryStats trajectory_stats(const Trajectory& traj) {
    TrajectoryStats st;
    if (traj.size() == 0) return st;
    st.min_state_coord = 1.0;
    st.inf_d_min = traj.diagnostics.front().d_min;
    st.inf_d_max = traj.diagnostics.front().d_max;
    const auto& com0 = traj.diagnostics.front().com;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto& snap = traj.snapshots[k];
        const auto& row = traj.diagnostics[k];
        for (const auto& w : snap.states) {
            st.max_simplex_drift = std::max(st.max_simplex_drift, std::abs(w.total() - 1.0));
            st.min_state_coord = std::min({st.min_state_coord, w.s, w.i, w.r});
        }
        double sq = 0.0;
        for (std::size_t c = 0; c < com0.size(); ++c) sq += (row.com[c] - com0[c]) * (row.com[c] - com0[c]);
        st.com_drift = std::max(st.com_drift, std::sqrt(sq));
        st.inf_d_min = std::min(st.inf_d_min, row.d_min);
        st.sup_d_max = std::max(st.sup_d_max, row.d_max);
        st.inf_d_max = std::min(st.inf_d_max, row.d_max);
        if (k > 0) {
            const auto& prev = traj.snapshots[k - 1];
            for (std::size_t i = 0; i < snap.size(); ++i) {
                st.max_s_increase = std::max(st.max_s_increase, snap.states[i].s - prev.states[i].s);
                st.max_r_decrease = std::max(st.max_r_decrease, prev.states[i].r - snap.states[i].r);
            }
        }
    }
    return st;
}

BoundReport bound_report(const ModelParams& p, const Ensemble& e0) {
    const auto dists = ordered_distances(e0);
    const double d1 = dists.empty() ? 0.0 : dists.front();
    const double dq = dists.empty() ? 0.0 : dists.back();

    BoundReport rep;
    rep.lambda_rate = decay_rate_lambda(p);
    rep.lambda_relaxed_ok = relaxed_decay_ok(p, e0);
    rep.log_capital_lambda = log_capital_lambda(p, d1);
    rep.capital_lambda = std::exp(rep.log_capital_lambda);
    rep.upper_bound_ok = upper_bound_gate(p, d1, GateExponent::BetaMinusAlpha);
    rep.upper_bound_ok_reciprocal = upper_bound_gate(p, d1, GateExponent::ReciprocalBetaMinusAlpha);
    if (p.kappa2 > 0.0) {
        rep.delta_q = delta_q_bound(p, dq);
        rep.x_infinity = two_particle_equilibrium(p);
        rep.two_particle_b_ok = two_particle_b_ok(p);
        if (p.kappa3 > 0.0 && dq > 0.0) rep.diameter_ceiling = diameter_ceiling(p, dq);
    }
    return rep;
}

} // namespace sirflock
