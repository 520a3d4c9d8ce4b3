#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sirflock/types.hpp"

namespace sirflock {

/// Agreement of two epidemic states, (1 - I_i)(1 - I_j) + I_i I_j. Lies in [0, 1].
double similarity(const EpidemicState& wi, const EpidemicState& wj) noexcept;

/// Attraction weight eps_a + G, in [eps_a, 1 + eps_a].
double attract_weight(const EpidemicState& wi, const EpidemicState& wj, const ModelParams& p) noexcept;

/// Repulsion weight 1 + eps_r - G, in [eps_r, 1 + eps_r].
double repulse_weight(const EpidemicState& wi, const EpidemicState& wj, const ModelParams& p) noexcept;

/// Transmission kernel 1 / (|x_i - x_j| + L)^gamma, zero on the diagonal.
double adjacency(std::span<const double> xi, std::span<const double> xj, std::size_t i, std::size_t j,
                 const ModelParams& p);

struct EpidemicRates {
    double ds = 0.0;
    double di = 0.0;
    double dr = 0.0;
};

/// Per-particle (dS, dI, dR). dI is formed as -(dS + dR), so (dS + dR) + dI == 0 bit-exactly.
std::vector<EpidemicRates> epidemic_rhs(const Ensemble& e, const ModelParams& p,
                                        double collision_tol = kDefaultCollisionTol);

/// Per-particle velocities, row-major like Ensemble::coords.
///
/// Each unordered pair is visited once and contributes equal and opposite
/// terms to both particles. Throws CollisionError when a pair is closer than
/// `collision_tol`.
std::vector<double> position_rhs(const Ensemble& e, const ModelParams& p,
                                 double collision_tol = kDefaultCollisionTol);

struct PhaseDerivative {
    std::vector<EpidemicRates> rates;
    std::vector<double> velocity;
};

PhaseDerivative full_rhs(const Ensemble& e, const ModelParams& p, double collision_tol = kDefaultCollisionTol);

namespace detail {

/// base^exponent with exact small-integer fast paths. base must be > 0.
double power(double base, double exponent) noexcept;

} // namespace detail

} // namespace sirflock
