#include "sirflock/model.hpp"

#include <cmath>

#include "sirflock/errors.hpp"

namespace sirflock {

namespace detail {

double power(double base, double exponent) noexcept {
    if (exponent == 0.0) return 1.0;
    if (exponent == 1.0) return base;
    if (exponent == 2.0) return base * base;
    if (exponent == 3.0) return base * base * base;
    if (exponent == 4.0) {
        const double sq = base * base;
        return sq * sq;
    }
    if (exponent == 5.0) {
        const double sq = base * base;
        return sq * sq * base;
    }
    return std::pow(base, exponent);
}

} // namespace detail

double similarity(const EpidemicState& wi, const EpidemicState& wj) noexcept {
    return (1.0 - wi.i) * (1.0 - wj.i) + wi.i * wj.i;
}

double attract_weight(const EpidemicState& wi, const EpidemicState& wj, const ModelParams& p) noexcept {
    return p.eps_a + similarity(wi, wj);
}

double repulse_weight(const EpidemicState& wi, const EpidemicState& wj, const ModelParams& p) noexcept {
    return 1.0 + p.eps_r - similarity(wi, wj);
}

double adjacency(std::span<const double> xi, std::span<const double> xj, std::size_t i, std::size_t j,
                 const ModelParams& p) {
    if (i == j) return 0.0;
    return 1.0 / detail::power(distance(xi, xj) + p.l_offset, p.gamma_exp);
}

std::vector<EpidemicRates> epidemic_rhs(const Ensemble& e, const ModelParams& p, double collision_tol) {
    const std::size_t n = e.size();
    // exposure[i] = sum_j a^{ij} I_j
    std::vector<double> exposure(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double r = distance(e.position(i), e.position(j));
            if (r < collision_tol) throw CollisionError(i, j, r);
            const double a = 1.0 / detail::power(r + p.l_offset, p.gamma_exp);
            exposure[i] += a * e.states[j].i;
            exposure[j] += a * e.states[i].i;
        }
    }

    std::vector<EpidemicRates> rates(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& w = e.states[i];
        auto& out = rates[i];
        out.ds = -p.kappa1 * exposure[i] * w.s;
        out.dr = p.recovery[i] * w.i;
        out.di = -(out.ds + out.dr);
    }
    return rates;
}

std::vector<double> position_rhs(const Ensemble& e, const ModelParams& p, double collision_tol) {
    const std::size_t n = e.size();
    const std::size_t dim = e.dim;
    std::vector<double> velocity(n * dim, 0.0);
    if (n < 2) return velocity;

    const double attract = p.kappa2 / static_cast<double>(n);
    const double repulse = p.kappa3 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto xi = e.position(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto xj = e.position(j);
            const double r = distance(xi, xj);
            if (r < collision_tol) throw CollisionError(i, j, r);
            const double g = similarity(e.states[i], e.states[j]);
            const double psi_a = p.eps_a + g;
            const double psi_r = 1.0 + p.eps_r - g;
            // coefficient of (x_j - x_i) in the velocity of particle i
            const double c = attract * psi_a / detail::power(r, p.alpha) - repulse * psi_r / detail::power(r, p.beta);
            double* vi = velocity.data() + i * dim;
            double* vj = velocity.data() + j * dim;
            for (std::size_t k = 0; k < dim; ++k) {
                const double f = c * (xj[k] - xi[k]);
                vi[k] += f;
                vj[k] -= f;
            }
        }
    }
    return velocity;
}

PhaseDerivative full_rhs(const Ensemble& e, const ModelParams& p, double collision_tol) {
    return {epidemic_rhs(e, p, collision_tol), position_rhs(e, p, collision_tol)};
}

} // namespace sirflock
