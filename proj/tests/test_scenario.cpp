#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "sirflock/errors.hpp"
#include "sirflock/scenario.hpp"

using namespace sirflock;

namespace {

const char* kMinimal = R"(format_version = 1
name = tiny

[params]
n = 2
d = 2
kappa1 = 1
kappa2 = 1
kappa3 = 1
alpha = 1
beta = 2
gamma = 1
l_offset = 1
eps_a = 0.2
eps_r = 0.2
recovery = 0.5
symptom = 1, 0.5
confirm_threshold = 0.3

[sim]
dt = 0.01
t_end = 1

[init]
mode = explicit
particle = 1, 0, 0, 0, 0
particle = 0.2, 0.8, 0, 1, 0
)";

int error_line(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return -1;
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
    const auto at = text.find(from);
    REQUIRE(at != std::string::npos);
    return text.replace(at, from.size(), to);
}

} // namespace

TEST_CASE("parse a minimal explicit scenario") {
    const auto spec = parse_scenario(kMinimal);
    CHECK(spec.name == "tiny");
    CHECK(spec.params.n == 2);
    CHECK(spec.params.recovery == std::vector<double>{0.5, 0.5});
    CHECK(spec.params.symptom == std::vector<double>{1.0, 0.5});
    CHECK(spec.sim.dt == 0.01);
    CHECK(spec.sim.record_stride == 1);
    const auto& e = std::get<Ensemble>(spec.init);
    CHECK(e.states[1] == EpidemicState{0.2, 0.8, 0.0});
    CHECK(e.coords == std::vector<double>{0, 0, 1, 0});
}

TEST_CASE("parse errors carry line numbers") {
    CHECK(error_line(replace(kMinimal, "gamma = 1", "gamma = one")) == 12);
    CHECK(error_line(replace(kMinimal, "gamma = 1", "gamma = 1\ngamma = 2")) == 13);
    CHECK(error_line(replace(kMinimal, "gamma = 1", "colour = red")) == 12);
    CHECK(error_line(replace(kMinimal, "[sim]", "[simulation]")) == 20);
    CHECK(error_line(replace(kMinimal, "dt = 0.01", "dt 0.01")) == 21);
    CHECK_THROWS_AS(parse_scenario(replace(kMinimal, "format_version = 1\n", "")), ParseError);
    CHECK_THROWS_AS(parse_scenario(replace(kMinimal, "format_version = 1", "format_version = 9")), ParseError);
}

TEST_CASE("validation names the violated invariant") {
    try {
        parse_scenario(replace(kMinimal, "beta = 2", "beta = 1"));
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("alpha < beta") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_scenario(replace(kMinimal, "alpha = 1", "alpha = 0.5")), ValidationError);
    CHECK_THROWS_AS(parse_scenario(replace(kMinimal, "eps_r = 0.2", "eps_r = 0")), ValidationError);
    CHECK_THROWS_AS(parse_scenario(replace(kMinimal, "particle = 0.2, 0.8, 0, 1, 0", "particle = 0.2, 0.9, 0, 1, 0")),
                    ValidationError);
    CHECK_THROWS_AS(parse_scenario(replace(kMinimal, "particle = 0.2, 0.8, 0, 1, 0", "particle = 0.2, 0.8, 0, 0, 0")),
                    CollisionError);
    CHECK_THROWS_AS(parse_scenario(replace(kMinimal, "symptom = 1, 0.5", "symptom = 1, 0.5, 1")), ParseError);
}

TEST_CASE("presets match the published parameters") {
    const auto fig1 = preset("fig1").params;
    CHECK(fig1.n == 20);
    CHECK(fig1.kappa1 == 1.0);
    CHECK(fig1.kappa2 == 1.0);
    CHECK(fig1.kappa3 == 5.0);
    CHECK(fig1.alpha == 1.0);
    CHECK(fig1.beta == 2.0);
    CHECK(fig1.gamma_exp == 1.0);
    CHECK(fig1.l_offset == 1.0);
    CHECK(fig1.min_recovery() == 0.4);

    const auto fig3 = preset("fig3").params;
    CHECK(fig3.min_recovery() == 1.0);
    CHECK(fig3.gamma_exp == 3.0);
    CHECK(fig3.l_offset == 3.0);

    const auto gen = std::get<GeneratorSpec>(preset("fig1").init);
    CHECK(gen.n_uninfected == 16);
    CHECK(gen.n_infected == 4);
    CHECK(gen.infected_state == EpidemicState{0.1, 0.9, 0.0});
    CHECK(gen.box_side == 3.0);

    CHECK_THROWS_AS(preset("fig2"), std::out_of_range);
    CHECK(preset_names().size() == 7);
}

TEST_CASE("round trip through text") {
    for (const auto& name : preset_names()) {
        const auto spec = preset(name);
        CHECK(parse_scenario(format_scenario(spec)) == spec);
    }
    const auto tiny = parse_scenario(kMinimal);
    CHECK(parse_scenario(format_scenario(tiny)) == tiny);

    auto odd = preset("fig4");
    odd.params.kappa3 = 0.1 + 0.2;
    odd.sim.dt = 1.0 / 3.0;
    std::get<GeneratorSpec>(odd.init).seed = 18446744073709551615ull;
    CHECK(parse_scenario(format_scenario(odd)) == odd);
}

TEST_CASE("load and save") {
    const auto dir = std::filesystem::temp_directory_path() / "sirflock_scenario_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "fig6.txt";
    save_scenario(preset("fig6"), path);
    CHECK(load_scenario(path) == preset("fig6"));
    CHECK(resolve_scenario("fig6") == preset("fig6"));
    CHECK(resolve_scenario(path.string()) == preset("fig6"));
    CHECK_THROWS_AS(load_scenario(dir / "missing.txt"), Error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("generator is deterministic and respects groups") {
    const auto spec = preset("fig1");
    const auto a = initial_ensemble(spec);
    const auto b = initial_ensemble(spec);
    CHECK(a == b);
    CHECK(a.size() == 20);
    std::size_t sick = 0;
    for (const auto& w : a.states) sick += w.i > 0.0;
    CHECK(sick == 4);
    for (double c : a.coords) {
        CHECK(c >= 0.0);
        CHECK(c < 3.0);
    }

    auto other = spec;
    std::get<GeneratorSpec>(other.init).seed = 2;
    CHECK_FALSE(initial_ensemble(other) == a);

    auto healthy = spec;
    auto& gen = std::get<GeneratorSpec>(healthy.init);
    gen.n_uninfected = 20;
    gen.n_infected = 0;
    for (const auto& w : initial_ensemble(healthy).states) CHECK(w == EpidemicState{1.0, 0.0, 0.0});
}

TEST_CASE("generator honours minimum separation and gives up when crowded") {
    auto spec = preset("fig1");
    auto& gen = std::get<GeneratorSpec>(spec.init);
    gen.min_separation = 0.3;
    const auto e = initial_ensemble(spec);
    for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) CHECK(distance(e.position(i), e.position(j)) >= 0.3);

    gen.min_separation = 2.0;
    CHECK_THROWS_AS(initial_ensemble(spec), Error);
}

TEST_CASE("format_double round trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(3.0) == "3");
}
