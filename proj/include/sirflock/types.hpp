#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sirflock {

/// Default minimal admissible pairwise distance (model length units).
inline constexpr double kDefaultCollisionTol = 1e-8;

/// Tolerance for |S + I + R - 1| when validating user-supplied states.
inline constexpr double kSimplexTol = 1e-9;

/// Round-off slack allowed below zero for each state coordinate.
inline constexpr double kNonnegativeSlack = 1e-12;

/// Probability triple (S, I, R) for a single particle.
struct EpidemicState {
    double s = 1.0;
    double i = 0.0;
    double r = 0.0;

    double total() const noexcept { return s + i + r; }
    bool operator==(const EpidemicState&) const = default;
};

/// True when the state lies on the unit simplex within the given tolerances.
bool on_simplex(const EpidemicState& w, double sum_tol = kSimplexTol,
                double neg_tol = kNonnegativeSlack) noexcept;

/// All constants of the coupled system.
///
/// `recovery` and `symptom` carry one entry per particle. The weight bounds
/// m_a, M_a, m_r, M_r are not stored: they follow from the floors eps_a, eps_r.
struct ModelParams {
    std::size_t n = 1;
    std::size_t d = 2;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double kappa3 = 0.0;
    double alpha = 1.0;
    double beta = 2.0;
    double gamma_exp = 0.0;
    double l_offset = 1.0;
    double eps_a = 0.2;
    double eps_r = 0.2;
    std::vector<double> recovery{1.0};
    std::vector<double> symptom{1.0};
    double confirm_threshold = 0.5;

    double m_a() const noexcept { return eps_a; }
    double big_m_a() const noexcept { return 1.0 + eps_a; }
    double m_r() const noexcept { return eps_r; }
    double big_m_r() const noexcept { return 1.0 + eps_r; }
    double min_recovery() const;

    bool operator==(const ModelParams&) const = default;
};

/// Throws ValidationError naming the first violated invariant.
void validate(const ModelParams& p);

/// Builds a parameter set with uniform recovery and symptom vectors.
ModelParams uniform_params(std::size_t n, std::size_t d, double recovery, double symptom = 1.0);

/// The full phase point: N epidemic states and N positions in R^d.
///
/// Positions are stored row-major, `coords[i * dim + k]`.
struct Ensemble {
    std::size_t dim = 2;
    std::vector<EpidemicState> states;
    std::vector<double> coords;

    Ensemble() = default;
    Ensemble(std::size_t n, std::size_t d) : dim(d), states(n), coords(n * d, 0.0) {}

    std::size_t size() const noexcept { return states.size(); }

    std::span<const double> position(std::size_t i) const { return {coords.data() + i * dim, dim}; }
    std::span<double> position(std::size_t i) { return {coords.data() + i * dim, dim}; }

    bool operator==(const Ensemble&) const = default;
};

/// Checks shape against the parameters, the simplex and finiteness of every
/// coordinate, and pairwise distinctness (distance >= collision_tol).
void validate(const Ensemble& e, const ModelParams& p, double collision_tol = kDefaultCollisionTol);

/// Euclidean distance between two points of equal dimension.
double distance(std::span<const double> a, std::span<const double> b) noexcept;

} // namespace sirflock
