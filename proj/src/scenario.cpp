#include "sirflock/scenario.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "sirflock/errors.hpp"

namespace sirflock {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

void validate(const ScenarioSpec& spec) {
    validate(spec.params);
    validate(spec.sim);
    if (const auto* gen = std::get_if<GeneratorSpec>(&spec.init)) {
        if (gen->n_uninfected + gen->n_infected != spec.params.n)
            throw ValidationError("generator counts n_uninfected + n_infected must equal n");
        if (!(gen->box_side > 0.0)) throw ValidationError("generator box_side must be > 0");
        if (!(gen->min_separation >= 0.0)) throw ValidationError("generator min_separation must be >= 0");
        if (!on_simplex(gen->uninfected_state)) throw ValidationError("uninfected_state off the probability simplex");
        if (!on_simplex(gen->infected_state)) throw ValidationError("infected_state off the probability simplex");
    } else {
        validate(std::get<Ensemble>(spec.init), spec.params, spec.sim.collision_tol);
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

class Reader {
public:
    Reader(const std::string& source, std::size_t line) : source_(source), line_(line) {}

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(source_, line_, msg); }

    double number(std::string_view text) const {
        text = trim(text);
        double v = 0.0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
            fail("expected a number, got '" + std::string(text) + "'");
        return v;
    }

    std::uint64_t count(std::string_view text) const {
        text = trim(text);
        std::uint64_t v = 0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
            fail("expected a non-negative integer, got '" + std::string(text) + "'");
        return v;
    }

    std::vector<double> list(std::string_view text) const {
        std::vector<double> out;
        std::size_t start = 0;
        while (true) {
            const auto comma = text.find(',', start);
            out.push_back(number(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start)));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        return out;
    }

    EpidemicState state(std::string_view text) const {
        const auto v = list(text);
        if (v.size() != 3) fail("an epidemic state needs exactly 3 values S, I, R");
        return {v[0], v[1], v[2]};
    }

private:
    const std::string& source_;
    std::size_t line_;
};

struct PendingVector {
    std::vector<double> values;
    std::size_t line = 0;
};

} // namespace

ScenarioSpec parse_scenario(std::string_view text, const std::string& source) {
    ScenarioSpec spec;
    GeneratorSpec gen;
    std::vector<std::vector<double>> particles;
    std::string mode = "generator";
    std::string section;
    bool saw_version = false;
    PendingVector recovery;
    PendingVector symptom;
    std::map<std::string, std::size_t> seen;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        std::string_view raw = text.substr(pos, eol == std::string_view::npos ? text.npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const auto line = trim(raw);
        if (line.empty()) continue;
        const Reader rd(source, line_no);

        if (line.front() == '[') {
            if (line.back() != ']') rd.fail("unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section != "params" && section != "sim" && section != "init") rd.fail("unknown section [" + section + "]");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) rd.fail("expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) rd.fail("empty key");
        if (value.empty()) rd.fail("empty value for '" + key + "'");

        const std::string qualified = section + "." + key;
        if (key != "particle") {
            if (auto [it, fresh] = seen.emplace(qualified, line_no); !fresh)
                rd.fail("duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")");
        }

        if (section.empty()) {
            if (key == "format_version") {
                const auto v = rd.count(value);
                if (v != static_cast<std::uint64_t>(kScenarioFormatVersion))
                    rd.fail("unsupported format_version " + std::to_string(v));
                saw_version = true;
            } else if (key == "name") {
                spec.name = std::string(value);
            } else {
                rd.fail("unknown top-level key '" + key + "'");
            }
        } else if (section == "params") {
            auto& p = spec.params;
            if (key == "n") p.n = rd.count(value);
            else if (key == "d") p.d = rd.count(value);
            else if (key == "kappa1") p.kappa1 = rd.number(value);
            else if (key == "kappa2") p.kappa2 = rd.number(value);
            else if (key == "kappa3") p.kappa3 = rd.number(value);
            else if (key == "alpha") p.alpha = rd.number(value);
            else if (key == "beta") p.beta = rd.number(value);
            else if (key == "gamma") p.gamma_exp = rd.number(value);
            else if (key == "l_offset") p.l_offset = rd.number(value);
            else if (key == "eps_a") p.eps_a = rd.number(value);
            else if (key == "eps_r") p.eps_r = rd.number(value);
            else if (key == "recovery") recovery = {rd.list(value), line_no};
            else if (key == "symptom") symptom = {rd.list(value), line_no};
            else if (key == "confirm_threshold") p.confirm_threshold = rd.number(value);
            else rd.fail("unknown key '" + key + "' in [params]");
        } else if (section == "sim") {
            auto& s = spec.sim;
            if (key == "dt") s.dt = rd.number(value);
            else if (key == "t_end") s.t_end = rd.number(value);
            else if (key == "record_stride") s.record_stride = rd.count(value);
            else if (key == "collision_tol") s.collision_tol = rd.number(value);
            else if (key == "drift_tol") s.drift_tol = rd.number(value);
            else rd.fail("unknown key '" + key + "' in [sim]");
        } else {
            if (key == "mode") {
                mode = std::string(value);
                if (mode != "generator" && mode != "explicit") rd.fail("mode must be 'generator' or 'explicit'");
            } else if (key == "n_uninfected") gen.n_uninfected = rd.count(value);
            else if (key == "n_infected") gen.n_infected = rd.count(value);
            else if (key == "uninfected_state") gen.uninfected_state = rd.state(value);
            else if (key == "infected_state") gen.infected_state = rd.state(value);
            else if (key == "box_side") gen.box_side = rd.number(value);
            else if (key == "seed") gen.seed = rd.count(value);
            else if (key == "min_separation") gen.min_separation = rd.number(value);
            else if (key == "particle") {
                auto row = rd.list(value);
                if (row.size() < 4) rd.fail("particle needs S, I, R and at least one coordinate");
                particles.push_back(std::move(row));
            } else rd.fail("unknown key '" + key + "' in [init]");
        }
    }

    if (!saw_version) throw ParseError(source, 0, "missing format_version");

    auto& p = spec.params;
    auto expand = [&](const PendingVector& pv, std::vector<double>& target, const char* what) {
        if (pv.line == 0) {
            target.assign(p.n, target.empty() ? 1.0 : target.front());
        } else if (pv.values.size() == 1) {
            target.assign(p.n, pv.values.front());
        } else if (pv.values.size() == p.n) {
            target = pv.values;
        } else {
            throw ParseError(source, pv.line, std::string(what) + " needs 1 or n values");
        }
    };
    expand(recovery, p.recovery, "recovery");
    expand(symptom, p.symptom, "symptom");

    if (mode == "explicit") {
        Ensemble e(particles.size(), p.d);
        for (std::size_t i = 0; i < particles.size(); ++i) {
            const auto& row = particles[i];
            if (row.size() != 3 + p.d)
                throw ParseError(source, 0, "particle " + std::to_string(i) + " needs 3 + d values");
            e.states[i] = {row[0], row[1], row[2]};
            for (std::size_t k = 0; k < p.d; ++k) e.coords[i * p.d + k] = row[3 + k];
        }
        spec.init = std::move(e);
    } else {
        if (!particles.empty()) throw ParseError(source, 0, "particle rows require mode = explicit");
        spec.init = gen;
    }

    validate(spec);
    return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scenario file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.string());
}

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

namespace {

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += ", ";
        out += format_double(v[k]);
    }
    return out;
}

std::string state_text(const EpidemicState& w) { return join({w.s, w.i, w.r}); }

std::string compact(const std::vector<double>& v) {
    bool uniform = !v.empty();
    for (double x : v) uniform = uniform && x == v.front();
    return uniform ? format_double(v.front()) : join(v);
}

} // namespace

std::string format_scenario(const ScenarioSpec& spec) {
    const auto& p = spec.params;
    const auto& s = spec.sim;
    std::ostringstream os;
    os << "format_version = " << kScenarioFormatVersion << "\n";
    os << "name = " << spec.name << "\n\n";
    os << "[params]\n";
    os << "n = " << p.n << "\n";
    os << "d = " << p.d << "\n";
    os << "kappa1 = " << format_double(p.kappa1) << "\n";
    os << "kappa2 = " << format_double(p.kappa2) << "\n";
    os << "kappa3 = " << format_double(p.kappa3) << "\n";
    os << "alpha = " << format_double(p.alpha) << "\n";
    os << "beta = " << format_double(p.beta) << "\n";
    os << "gamma = " << format_double(p.gamma_exp) << "\n";
    os << "l_offset = " << format_double(p.l_offset) << "\n";
    os << "eps_a = " << format_double(p.eps_a) << "\n";
    os << "eps_r = " << format_double(p.eps_r) << "\n";
    os << "recovery = " << compact(p.recovery) << "\n";
    os << "symptom = " << compact(p.symptom) << "\n";
    os << "confirm_threshold = " << format_double(p.confirm_threshold) << "\n\n";
    os << "[sim]\n";
    os << "dt = " << format_double(s.dt) << "\n";
    os << "t_end = " << format_double(s.t_end) << "\n";
    os << "record_stride = " << s.record_stride << "\n";
    os << "collision_tol = " << format_double(s.collision_tol) << "\n";
    os << "drift_tol = " << format_double(s.drift_tol) << "\n\n";
    os << "[init]\n";
    if (const auto* gen = std::get_if<GeneratorSpec>(&spec.init)) {
        os << "mode = generator\n";
        os << "n_uninfected = " << gen->n_uninfected << "\n";
        os << "n_infected = " << gen->n_infected << "\n";
        os << "uninfected_state = " << state_text(gen->uninfected_state) << "\n";
        os << "infected_state = " << state_text(gen->infected_state) << "\n";
        os << "box_side = " << format_double(gen->box_side) << "\n";
        os << "seed = " << gen->seed << "\n";
        os << "min_separation = " << format_double(gen->min_separation) << "\n";
    } else {
        const auto& e = std::get<Ensemble>(spec.init);
        os << "mode = explicit\n";
        for (std::size_t i = 0; i < e.size(); ++i) {
            std::vector<double> row{e.states[i].s, e.states[i].i, e.states[i].r};
            for (double c : e.position(i)) row.push_back(c);
            os << "particle = " << join(row) << "\n";
        }
    }
    return os.str();
}

void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write scenario file '" + path.string() + "'");
    out << format_scenario(spec);
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace {

// Shared population of the numerical section: 16 susceptible and 4 infected
// particles in a 3 x 3 square, kappa1 = 1, eps_a = eps_r = 0.2.
ScenarioSpec flock_population(std::string name, double recovery, double gamma, double l_offset, double alpha,
                              double beta, double kappa2, double kappa3) {
    ScenarioSpec spec;
    spec.name = std::move(name);
    auto& p = spec.params;
    p = uniform_params(20, 2, recovery, 1.0);
    p.kappa1 = 1.0;
    p.kappa2 = kappa2;
    p.kappa3 = kappa3;
    p.alpha = alpha;
    p.beta = beta;
    p.gamma_exp = gamma;
    p.l_offset = l_offset;
    p.eps_a = 0.2;
    p.eps_r = 0.2;
    p.confirm_threshold = 0.5;
    spec.sim.dt = 1e-3;
    spec.sim.t_end = 30.0;
    spec.sim.record_stride = 10;
    spec.init = GeneratorSpec{};
    return spec;
}

ScenarioSpec two_particle_preset() {
    ScenarioSpec spec;
    spec.name = "two_particle";
    auto& p = spec.params;
    p = uniform_params(2, 2, 2.0, 1.0);
    p.kappa1 = 1.0;
    p.kappa2 = 1.0;
    p.kappa3 = 1.0;
    p.alpha = 1.0;
    p.beta = 2.0;
    p.gamma_exp = 1.0;
    p.l_offset = 1.0;
    spec.sim.dt = 1e-3;
    spec.sim.t_end = 200.0;
    spec.sim.record_stride = 100;
    Ensemble e(2, 2);
    e.states[0] = {1.0, 0.0, 0.0};
    e.states[1] = {1.0, 0.0, 0.0};
    e.coords = {0.0, 0.0, 1.0, 0.0};
    spec.init = std::move(e);
    return spec;
}

} // namespace

std::vector<std::string> preset_names() {
    return {"fig1", "fig1b", "fig3", "fig4", "fig6", "fig7", "two_particle"};
}

ScenarioSpec preset(std::string_view name) {
    // (b, gamma, L, alpha, beta, kappa2, kappa3)
    if (name == "fig1") return flock_population("fig1", 0.4, 1.0, 1.0, 1.0, 2.0, 1.0, 5.0);
    if (name == "fig1b") return flock_population("fig1b", 0.4, 1.0, 1.0, 2.0, 5.0, 10.0, 1.0);
    if (name == "fig3") return flock_population("fig3", 1.0, 3.0, 3.0, 1.0, 2.0, 1.0, 5.0);
    if (name == "fig4") return flock_population("fig4", 1.0, 3.0, 3.0, 2.0, 5.0, 10.0, 1.0);
    if (name == "fig6") return flock_population("fig6", 0.4, 3.0, 1.0, 1.0, 2.0, 1.0, 10.0);
    if (name == "fig7") return flock_population("fig7", 0.2, 3.0, 3.0, 2.0, 5.0, 1.0, 10.0);
    if (name == "two_particle") return two_particle_preset();
    throw std::out_of_range("unknown preset '" + std::string(name) + "'");
}

ScenarioSpec resolve_scenario(const std::string& name_or_path) {
    for (const auto& n : preset_names()) {
        if (n == name_or_path) return preset(n);
    }
    return load_scenario(name_or_path);
}

// ---------------------------------------------------------------------------
// Initial data
// ---------------------------------------------------------------------------

Ensemble generate_initial(const GeneratorSpec& gen, const ModelParams& p, double collision_tol) {
    const std::size_t n = gen.n_uninfected + gen.n_infected;
    if (n != p.n) throw ValidationError("generator counts n_uninfected + n_infected must equal n");
    if (!(gen.box_side > 0.0)) throw ValidationError("generator box_side must be > 0");

    // 53-bit uniforms straight from the engine keep placement identical across standard libraries.
    std::mt19937_64 engine(gen.seed);
    auto uniform = [&] { return static_cast<double>(engine() >> 11) * 0x1.0p-53 * gen.box_side; };

    const double floor = std::max(gen.min_separation, collision_tol);
    const std::size_t max_draws = 10 * n;
    Ensemble e(n, p.d);
    for (std::size_t i = 0; i < n; ++i) {
        e.states[i] = i < gen.n_uninfected ? gen.uninfected_state : gen.infected_state;
        bool placed = false;
        for (std::size_t attempt = 0; attempt < max_draws && !placed; ++attempt) {
            auto xi = e.position(i);
            for (auto& c : xi) c = uniform();
            placed = true;
            for (std::size_t j = 0; j < i && placed; ++j) placed = distance(xi, e.position(j)) >= floor;
        }
        if (!placed) {
            throw ValidationError("could not place particle " + std::to_string(i) + " after " +
                                  std::to_string(max_draws) + " draws; box too crowded");
        }
    }
    return e;
}

Ensemble initial_ensemble(const ScenarioSpec& spec) {
    if (const auto* gen = std::get_if<GeneratorSpec>(&spec.init))
        return generate_initial(*gen, spec.params, spec.sim.collision_tol);
    return std::get<Ensemble>(spec.init);
}

} // namespace sirflock
