#include <doctest.h>

#include <cmath>

#include "sirflock/errors.hpp"
#include "sirflock/integrator.hpp"

using namespace sirflock;

TEST_CASE("step schedule lands on t_end") {
    StepSchedule even(0.1, 1.0);
    CHECK(even.steps() == 10);
    CHECK(even.time_after(10) == 1.0);
    CHECK(even.step_size(10) == 0.1);

    StepSchedule ragged(0.3, 1.0);
    CHECK(ragged.steps() == 4);
    CHECK(ragged.time_after(3) == doctest::Approx(0.9));
    CHECK(ragged.time_after(4) == 1.0);
    CHECK(ragged.step_size(4) == doctest::Approx(0.1));

    StepSchedule none(0.1, 0.0);
    CHECK(none.steps() == 0);
}

TEST_CASE("rk4 on a linear decay") {
    // One recovering particle with no contacts: I' = -b I, the scalar problem y' = -y.
    ModelParams p = uniform_params(1, 1, 1.0);
    Ensemble e(1, 1);
    e.states[0] = {0.0, 1.0, 0.0};
    const auto next = rk4_step(e, p, 0.1);
    const double taylor = 1.0 - 0.1 + 0.01 / 2 - 0.001 / 6 + 0.0001 / 24;
    CHECK(next.states[0].i == doctest::Approx(taylor).epsilon(1e-15));
    CHECK(next.states[0].i == doctest::Approx(0.9048375).epsilon(1e-7));
    CHECK(std::abs(next.states[0].i - std::exp(-0.1)) < 1e-7);
}

TEST_CASE("fixed point is preserved") {
    ModelParams p = uniform_params(1, 2, 1.0);
    Ensemble e(1, 2);
    e.coords = {0.5, -2.0};
    CHECK(rk4_step(e, p, 0.25) == e);
}

TEST_CASE("simulate with t_end = 0 returns the initial snapshot") {
    ModelParams p = uniform_params(2, 2, 1.0);
    p.kappa2 = 1.0;
    Ensemble e(2, 2);
    e.coords = {0.0, 0.0, 1.0, 0.0};
    SimulationConfig cfg;
    cfg.t_end = 0.0;
    const auto traj = simulate(e, p, cfg);
    REQUIRE(traj.size() == 1);
    CHECK(traj.times[0] == 0.0);
    CHECK(traj.snapshots[0] == e);
}

TEST_CASE("record stride keeps the final step") {
    ModelParams p = uniform_params(1, 1, 1.0);
    Ensemble e(1, 1);
    e.states[0] = {0.0, 1.0, 0.0};
    SimulationConfig cfg;
    cfg.dt = 0.1;
    cfg.t_end = 1.05;
    cfg.record_stride = 4;
    const auto traj = simulate(e, p, cfg);
    REQUIRE(traj.size() == 4);
    CHECK(traj.times[1] == doctest::Approx(0.4));
    CHECK(traj.times[2] == doctest::Approx(0.8));
    CHECK(traj.times[3] == 1.05);
}

TEST_CASE("config validation") {
    SimulationConfig cfg;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(validate(cfg), ValidationError);
    cfg = {};
    cfg.t_end = -1.0;
    CHECK_THROWS_AS(validate(cfg), ValidationError);
    cfg = {};
    cfg.record_stride = 0;
    CHECK_THROWS_AS(validate(cfg), ValidationError);
}

TEST_CASE("collisions carry the time of the failed stage") {
    // Pure attraction closes the gap at a constant rate of 60; with this step the
    // midpoint stage of the first step lands both particles on the same point.
    ModelParams p = uniform_params(2, 1, 1.0);
    p.kappa2 = 50.0;
    p.kappa3 = 1e-20;
    Ensemble e(2, 1);
    e.coords = {0.0, 0.05};
    SimulationConfig cfg;
    cfg.dt = 0.05 / 30.0;
    cfg.t_end = 1.0;
    try {
        simulate(e, p, cfg);
        FAIL("expected a collision");
    } catch (const CollisionError& err) {
        CHECK(err.first() == 0);
        CHECK(err.second() == 1);
        CHECK(err.time() >= 0.0);
        CHECK(err.time() <= cfg.dt);
    }
}

TEST_CASE("diagnostics on a unit square") {
    ModelParams p = uniform_params(4, 2, 1.0);
    Ensemble e(4, 2);
    e.coords = {0, 0, 1, 0, 0, 1, 1, 1};
    e.states[2] = {0.5, 0.5, 0.0};
    const auto row = diagnose(e, p);
    CHECK(row.d_min == 1.0);
    CHECK(row.d_max == doctest::Approx(std::sqrt(2.0)));
    CHECK(row.total_i == 0.5);
    CHECK(row.mean_i == 0.125);
    CHECK(row.com[0] == 0.5);
    CHECK(row.com[1] == 0.5);
    CHECK(row.max_speed == 0.0);
}

TEST_CASE("confirmed set") {
    ModelParams p = uniform_params(2, 1, 1.0);
    p.symptom = {1.0, 0.5};
    p.confirm_threshold = 0.2;
    Ensemble e(2, 1);
    e.coords = {0.0, 1.0};
    e.states = {{0.7, 0.3, 0.0}, {0.7, 0.3, 0.0}};
    CHECK(confirmed_set(e, p) == std::vector<std::size_t>{0});

    p.symptom = {0.0, 0.0};
    CHECK(confirmed_set(e, p).empty());

    p.symptom = {1.0, 1.0};
    p.confirm_threshold = 0.0;
    e.states[1] = {1.0, 0.0, 0.0};
    CHECK(confirmed_set(e, p) == std::vector<std::size_t>{0, 1}); // s I >= 0 holds for everyone
}
