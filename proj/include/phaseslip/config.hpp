#pragma once

// Flat sectioned key=value run configuration. Every field has a default
// matching the headline parameter set (E_m = 25, E_c = 3, E_L = 1 GHz,
// Delta = 200 GHz, epsilon = 25 MHz, tau_qp = 10 us, grid [-6pi, 10pi] x 4096),
// so an empty config reproduces the reference numbers. Unknown keys are
// rejected by name.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "phaseslip/errors.hpp"
#include "phaseslip/grid.hpp"
#include "phaseslip/model.hpp"
#include "phaseslip/protocol.hpp"

namespace phaseslip {

struct RunConfig {
    CircuitParams circuit;
    WireParams wire;
    bool epsilon_from_length = false;
    PhaseGrid grid;
    double dt_ns = 1e-3;
    int snapshot_stride = 500;

    InitMode init_mode = InitMode::ideal_left;
    double hold_start_ns = 0.0;
    double hold_stop_ns = 80.0;
    double hold_step_ns = 2.0;
    std::vector<double> hold_times_ns; // explicit list wins over the range
    int shots_per_point = 400;
    double poisoning_rate_per_ns = 1e-4;
    Measurement measurement = Measurement::projective_sampling;
    std::uint64_t seed = 12345;
    double ramp_time_ns = 0.0;

    // Which of the coupled junction keys were set explicitly.
    bool set_e_m = false, set_delta = false, set_transparency = false;

    void apply(const std::string& path, const std::string& value);
    void finalize();
    ProtocolConfig to_protocol() const;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': invalid number '" + v + "'");
    }
}

inline long parse_long(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': invalid integer '" + v + "'");
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key '" + key + "': invalid boolean '" + v + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

} // namespace detail

inline void RunConfig::apply(const std::string& path, const std::string& value) {
    using detail::parse_bool;
    using detail::parse_double;
    using detail::parse_list;
    using detail::parse_long;
    const std::string v = detail::trim(value);

    if (path == "circuit.e_c_ghz") circuit.e_c = parse_double(path, v);
    else if (path == "circuit.e_l_ghz") circuit.e_l = parse_double(path, v);
    else if (path == "circuit.e_m_ghz") { circuit.e_m = parse_double(path, v); set_e_m = true; }
    else if (path == "circuit.delta_ghz") { circuit.delta_gap = parse_double(path, v); set_delta = true; }
    else if (path == "circuit.transparency") { circuit.transparency = parse_double(path, v); set_transparency = true; }
    else if (path == "circuit.epsilon_ghz") circuit.epsilon = parse_double(path, v);
    else if (path == "circuit.junction_mode") {
        if (v == "topological") circuit.mode = JunctionMode::topological;
        else if (v == "trivial_tunneling") circuit.mode = JunctionMode::trivial_tunneling;
        else if (v == "trivial_full") circuit.mode = JunctionMode::trivial_full;
        else if (v == "combined") circuit.mode = JunctionMode::combined;
        else throw ConfigError("config key '" + path + "': unknown mode '" + v + "'");
    } else if (path == "circuit.charge_convention") {
        if (v == "single_electron") circuit.convention = ChargeConvention::single_electron;
        else if (v == "cooper_pair") circuit.convention = ChargeConvention::cooper_pair;
        else throw ConfigError("config key '" + path + "': unknown convention '" + v + "'");
    }
    else if (path == "wire.zeeman_ghz") wire.zeeman = parse_double(path, v);
    else if (path == "wire.mu_ghz") wire.mu = parse_double(path, v);
    else if (path == "wire.length_um") wire.length = parse_double(path, v);
    else if (path == "wire.xi_um") wire.xi = parse_double(path, v);
    else if (path == "wire.epsilon0_ghz") wire.epsilon0 = parse_double(path, v);
    else if (path == "wire.epsilon_from_length") epsilon_from_length = parse_bool(path, v);
    else if (path == "grid.phi_min_pi") grid.phi_min = parse_double(path, v) * std::numbers::pi;
    else if (path == "grid.phi_max_pi") grid.phi_max = parse_double(path, v) * std::numbers::pi;
    else if (path == "grid.points") grid.n = static_cast<int>(parse_long(path, v));
    else if (path == "dynamics.dt_ns") dt_ns = parse_double(path, v);
    else if (path == "dynamics.snapshot_stride") snapshot_stride = static_cast<int>(parse_long(path, v));
    else if (path == "protocol.init_mode") {
        if (v == "quench_ground") init_mode = InitMode::quench_ground;
        else if (v == "ideal_left") init_mode = InitMode::ideal_left;
        else throw ConfigError("config key '" + path + "': unknown init mode '" + v + "'");
    }
    else if (path == "protocol.hold_start_ns") hold_start_ns = parse_double(path, v);
    else if (path == "protocol.hold_stop_ns") hold_stop_ns = parse_double(path, v);
    else if (path == "protocol.hold_step_ns") hold_step_ns = parse_double(path, v);
    else if (path == "protocol.hold_times_ns") hold_times_ns = parse_list(path, v);
    else if (path == "protocol.shots_per_point") shots_per_point = static_cast<int>(parse_long(path, v));
    else if (path == "protocol.poisoning_rate_per_ns") poisoning_rate_per_ns = parse_double(path, v);
    else if (path == "protocol.measurement") {
        if (v == "projective_sampling") measurement = Measurement::projective_sampling;
        else if (v == "expectation") measurement = Measurement::expectation;
        else throw ConfigError("config key '" + path + "': unknown measurement '" + v + "'");
    }
    else if (path == "protocol.seed") seed = static_cast<std::uint64_t>(parse_long(path, v));
    else if (path == "protocol.ramp_time_ns") ramp_time_ns = parse_double(path, v);
    else throw ConfigError("unknown config key '" + path + "'");
}

// Resolve coupled parameters after all keys are applied. E_m, Delta and D
// are tied by E_m = Delta*sqrt(D); setting a subset updates the rest, while
// setting all three demands consistency (checked by CircuitParams).
inline void RunConfig::finalize() {
    if (epsilon_from_length) circuit.epsilon = majorana_epsilon(wire);
    if (set_e_m && !(set_delta && set_transparency)) {
        if (circuit.e_m > circuit.delta_gap)
            throw ConfigError("circuit.e_m_ghz exceeds delta_ghz; set delta_ghz too");
        const double r = circuit.e_m / circuit.delta_gap;
        circuit.transparency = r * r;
    } else if (!set_e_m && (set_delta || set_transparency)) {
        circuit.e_m = circuit.delta_gap * std::sqrt(circuit.transparency);
    }
    circuit.validate();
    wire.validate();
    grid.validate();
}

inline ProtocolConfig RunConfig::to_protocol() const {
    ProtocolConfig p;
    p.circuit = circuit;
    p.grid = grid;
    p.init_mode = init_mode;
    if (!hold_times_ns.empty()) {
        p.hold_times = hold_times_ns;
    } else {
        if (hold_step_ns <= 0.0)
            throw ConfigError("protocol.hold_step_ns must be > 0");
        for (double t = hold_start_ns; t <= hold_stop_ns + 1e-9; t += hold_step_ns)
            p.hold_times.push_back(t);
    }
    p.shots_per_point = shots_per_point;
    p.poisoning_rate = poisoning_rate_per_ns;
    p.measurement = measurement;
    p.seed = seed;
    p.ramp_time = ramp_time_ns;
    p.dt = dt_ns;
    return p;
}

// INI-style parser: [section] headers, key = value lines, '#'/';' comments.
inline RunConfig parse_config_text(std::istream& in) {
    RunConfig cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": malformed section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError("config key '" + key + "' appears before any [section]");
        cfg.apply(section + "." + key, value);
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config_text(in);
}

} // namespace phaseslip
