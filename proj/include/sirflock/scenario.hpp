#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sirflock/integrator.hpp"
#include "sirflock/types.hpp"

namespace sirflock {

/// Current scenario grammar version; files must declare `format_version = 1`.
inline constexpr int kScenarioFormatVersion = 1;

/// Random placement of two groups in [0, box_side]^d.
struct GeneratorSpec {
    std::size_t n_uninfected = 16;
    std::size_t n_infected = 4;
    EpidemicState uninfected_state{1.0, 0.0, 0.0};
    EpidemicState infected_state{0.1, 0.9, 0.0};
    double box_side = 3.0;
    std::uint64_t seed = 1;
    /// Draws closer than max(min_separation, collision_tol) to an earlier particle are resampled.
    double min_separation = 0.0;

    bool operator==(const GeneratorSpec&) const = default;
};

struct ScenarioSpec {
    std::string name = "custom";
    ModelParams params;
    SimulationConfig sim;
    std::variant<GeneratorSpec, Ensemble> init = GeneratorSpec{};

    bool operator==(const ScenarioSpec&) const = default;
};

/// Throws ValidationError on any violated invariant of params, sim or init.
void validate(const ScenarioSpec& spec);

/// Parses scenario text. `source` labels parse errors.
ScenarioSpec parse_scenario(std::string_view text, const std::string& source = "<scenario>");

/// Reads and parses a scenario file.
ScenarioSpec load_scenario(const std::filesystem::path& path);

/// Serialises a scenario so that parse_scenario(format_scenario(s)) == s.
std::string format_scenario(const ScenarioSpec& spec);

void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& path);

std::vector<std::string> preset_names();

/// Throws std::out_of_range for an unknown name.
ScenarioSpec preset(std::string_view name);

/// A preset name, or else a path to a scenario file.
ScenarioSpec resolve_scenario(const std::string& name_or_path);

/// Seeded uniform placement with rejection. Throws ValidationError when a
/// particle cannot be placed within 10 * N draws.
Ensemble generate_initial(const GeneratorSpec& gen, const ModelParams& p, double collision_tol);

/// The explicit ensemble, or the generated one.
Ensemble initial_ensemble(const ScenarioSpec& spec);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

} // namespace sirflock
