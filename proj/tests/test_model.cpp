#include <doctest.h>

#include <cmath>
#include <random>

#include "sirflock/errors.hpp"
#include "sirflock/model.hpp"

using namespace sirflock;

namespace {

EpidemicState infected(double i) { return {1.0 - i, i, 0.0}; }

Ensemble random_ensemble(std::mt19937_64& rng, std::size_t n, std::size_t d) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Ensemble e(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = u(rng), inf = u(rng) * (1.0 - s);
        e.states[i] = {s, inf, 1.0 - s - inf};
        for (std::size_t k = 0; k < d; ++k) e.coords[i * d + k] = 4.0 * u(rng) + 0.3 * static_cast<double>(i);
    }
    return e;
}

} // namespace

TEST_CASE("similarity values") {
    CHECK(similarity(infected(0), infected(0)) == 1.0);
    CHECK(similarity(infected(1), infected(0)) == 0.0);
    CHECK(similarity(infected(0.9), infected(0.9)) == doctest::Approx(0.82).epsilon(1e-15));
}

TEST_CASE("interaction weights at the worked points") {
    ModelParams p;
    CHECK(attract_weight(infected(0), infected(0), p) == doctest::Approx(1.2));
    CHECK(attract_weight(infected(1), infected(0), p) == doctest::Approx(0.2));
    CHECK(attract_weight(infected(0.9), infected(0.9), p) == doctest::Approx(1.02).epsilon(1e-14));
    CHECK(repulse_weight(infected(0), infected(0), p) == doctest::Approx(0.2));
    CHECK(repulse_weight(infected(1), infected(0), p) == doctest::Approx(1.2));
    CHECK(repulse_weight(infected(0.9), infected(0.9), p) == doctest::Approx(0.38).epsilon(1e-14));
}

TEST_CASE("weights are symmetric and stay inside their bounds") {
    ModelParams p;
    p.eps_a = 0.3;
    p.eps_r = 0.7;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        const auto a = infected(u(rng));
        const auto b = infected(u(rng));
        const double g = similarity(a, b);
        CHECK(g == doctest::Approx(similarity(b, a)));
        CHECK(g >= 0.0);
        CHECK(g <= 1.0);
        const double wa = attract_weight(a, b, p);
        const double wr = repulse_weight(a, b, p);
        CHECK(wa >= p.m_a());
        CHECK(wa <= p.big_m_a());
        CHECK(wr >= p.m_r());
        CHECK(wr <= p.big_m_r());
        CHECK(wa + wr == doctest::Approx(1.0 + p.eps_a + p.eps_r));
    }
}

TEST_CASE("adjacency kernel") {
    ModelParams p;
    p.gamma_exp = 1.0;
    p.l_offset = 1.0;
    const std::vector<double> a{0.0, 0.0}, b{1.0, 0.0}, c{3.0, 4.0};
    CHECK(adjacency(a, b, 0, 1, p) == doctest::Approx(0.5));
    CHECK(adjacency(a, a, 2, 2, p) == 0.0);
    CHECK(adjacency(a, c, 0, 1, p) == doctest::Approx(1.0 / 6.0));
    p.gamma_exp = 0.0;
    CHECK(adjacency(a, c, 0, 1, p) == 1.0);
}

TEST_CASE("epidemic rates for two particles") {
    ModelParams p = uniform_params(2, 1, 1.0);
    p.kappa1 = 1.0;
    p.gamma_exp = 0.0;
    Ensemble e(2, 1);
    e.states = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
    e.coords = {0.0, 2.0};
    const auto r = epidemic_rhs(e, p);
    CHECK(r[0].ds == -1.0);
    CHECK(r[0].di == 1.0);
    CHECK(r[0].dr == 0.0);
    CHECK(r[1].ds == 0.0);
    CHECK(r[1].di == -1.0);
    CHECK(r[1].dr == 1.0);
}

TEST_CASE("disease-free ensembles have zero epidemic rates") {
    std::mt19937_64 rng(2);
    Ensemble e = random_ensemble(rng, 6, 2);
    for (auto& w : e.states) w = {0.7, 0.0, 0.3};
    ModelParams p = uniform_params(6, 2, 0.5);
    p.kappa1 = 3.0;
    p.gamma_exp = 1.0;
    for (const auto& r : epidemic_rhs(e, p)) {
        CHECK(r.ds == 0.0);
        CHECK(r.di == 0.0);
        CHECK(r.dr == 0.0);
    }
}

TEST_CASE("homogeneous ensemble reproduces classical rates") {
    const double a = 1.2, b = 0.4;
    const std::size_t n = 5;
    ModelParams p = uniform_params(n, 2, b);
    p.kappa1 = a / (n - 1.0);
    p.gamma_exp = 0.0;
    std::mt19937_64 rng(9);
    Ensemble e = random_ensemble(rng, n, 2);
    for (auto& w : e.states) w = {0.6, 0.3, 0.1};
    for (const auto& r : epidemic_rhs(e, p)) {
        CHECK(r.ds == doctest::Approx(-a * 0.6 * 0.3));
        CHECK(r.di == doctest::Approx(a * 0.6 * 0.3 - b * 0.3));
        CHECK(r.dr == doctest::Approx(b * 0.3));
    }
}

TEST_CASE("rates are tangent to the simplex exactly") {
    std::mt19937_64 rng(4);
    for (int k = 0; k < 50; ++k) {
        Ensemble e = random_ensemble(rng, 7, 2);
        ModelParams p = uniform_params(7, 2, 0.3);
        p.kappa1 = 2.0;
        p.gamma_exp = 1.5;
        for (const auto& r : epidemic_rhs(e, p)) CHECK((r.ds + r.dr) + r.di == 0.0);
    }
}

TEST_CASE("velocity of a single particle is zero") {
    ModelParams p = uniform_params(1, 3, 1.0);
    p.kappa2 = 1.0;
    p.kappa3 = 1.0;
    Ensemble e(1, 3);
    e.coords = {1.0, 2.0, 3.0};
    for (double v : position_rhs(e, p)) CHECK(v == 0.0);
}

TEST_CASE("two-particle radial force changes sign at the equilibrium") {
    ModelParams p = uniform_params(2, 1, 1.0);
    p.kappa2 = 1.0;
    p.kappa3 = 1.0;
    const double r_star = std::pow(p.kappa3 * p.eps_r / (p.kappa2 * (1.0 + p.eps_a)), 1.0 / (p.beta - p.alpha));
    Ensemble e(2, 1);

    e.coords = {0.0, r_star};
    auto v = position_rhs(e, p);
    CHECK(std::abs(v[0]) < 1e-14);
    CHECK(std::abs(v[1]) < 1e-14);

    e.coords = {0.0, 0.5 * r_star};
    v = position_rhs(e, p);
    CHECK(v[0] < 0.0);
    CHECK(v[1] > 0.0);

    e.coords = {0.0, 2.0 * r_star};
    v = position_rhs(e, p);
    CHECK(v[0] > 0.0);
    CHECK(v[1] < 0.0);
}

TEST_CASE("velocities sum to zero") {
    std::mt19937_64 rng(8);
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = 2 + rng() % 10;
        Ensemble e = random_ensemble(rng, n, 3);
        ModelParams p = uniform_params(n, 3, 1.0);
        p.kappa2 = 1.5;
        p.kappa3 = 2.5;
        p.alpha = 1.3;
        p.beta = 2.7;
        const auto v = position_rhs(e, p);
        double scale = 0.0;
        for (double x : v) scale = std::max(scale, std::abs(x));
        for (std::size_t c = 0; c < 3; ++c) {
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) sum += v[i * 3 + c];
            CHECK(std::abs(sum) <= 1e-12 * static_cast<double>(n) * std::max(scale, 1.0));
        }
    }
}

TEST_CASE("velocities are translation invariant and rotation equivariant") {
    std::mt19937_64 rng(12);
    Ensemble e = random_ensemble(rng, 8, 2);
    ModelParams p = uniform_params(8, 2, 1.0);
    p.kappa2 = 1.0;
    p.kappa3 = 3.0;
    const auto v = position_rhs(e, p);

    Ensemble shifted = e;
    for (std::size_t i = 0; i < 8; ++i) {
        shifted.coords[2 * i] += 10.0;
        shifted.coords[2 * i + 1] -= 4.0;
    }
    const auto vs = position_rhs(shifted, p);
    for (std::size_t k = 0; k < v.size(); ++k) CHECK(vs[k] == doctest::Approx(v[k]).epsilon(1e-9));

    const double th = 0.7, c = std::cos(th), s = std::sin(th);
    Ensemble rotated = e;
    for (std::size_t i = 0; i < 8; ++i) {
        const double x = e.coords[2 * i], y = e.coords[2 * i + 1];
        rotated.coords[2 * i] = c * x - s * y;
        rotated.coords[2 * i + 1] = s * x + c * y;
    }
    const auto vr = position_rhs(rotated, p);
    for (std::size_t i = 0; i < 8; ++i) {
        const double x = v[2 * i], y = v[2 * i + 1];
        CHECK(vr[2 * i] == doctest::Approx(c * x - s * y).epsilon(1e-9));
        CHECK(vr[2 * i + 1] == doctest::Approx(s * x + c * y).epsilon(1e-9));
    }
}

TEST_CASE("collision guard reports the pair") {
    ModelParams p = uniform_params(3, 2, 1.0);
    p.kappa2 = 1.0;
    Ensemble e(3, 2);
    e.coords = {0.0, 0.0, 1.0, 1.0, 1.0, 1.0 + 1e-12};
    try {
        position_rhs(e, p);
        FAIL("expected a collision");
    } catch (const CollisionError& err) {
        CHECK(err.first() == 1);
        CHECK(err.second() == 2);
        CHECK(err.distance() < 1e-8);
    }
    CHECK_THROWS_AS(epidemic_rhs(e, p), CollisionError);
}

TEST_CASE("power fast paths agree with pow") {
    for (double base : {0.3, 1.0, 2.5, 17.0}) {
        for (double ex : {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 0.5, 1.5, 2.7}) {
            CHECK(detail::power(base, ex) == doctest::Approx(std::pow(base, ex)).epsilon(1e-14));
        }
    }
}
