#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "zeno/bloch.hpp"
#include "zeno/errors.hpp"
#include "zeno/trajectory.hpp"

namespace zeno {

inline constexpr double kTwoPi = 6.2831853071795864769252867665590058;

// One full experiment as the command line sees it. The drive lives in
// radians per second and seconds internally; the text format also accepts
// frequencies in hertz and converts them exactly once while parsing.
struct ExperimentConfig {
    DriveConfig drive{};
    double f0 = 1.0;
    double f1 = 1.0;
    long n_measurements = 500;
    long n_trajectories = 1;
    std::uint64_t seed = 0;
    TrajectoryMode mode = TrajectoryMode::Markov;

    void validate() const {
        drive.validate();
        if (!(f0 > 0.0) || f0 > 1.0)
            throw config_error("fidelity_on must lie in (0, 1]");
        if (!(f1 > 0.0) || f1 > 1.0)
            throw config_error("fidelity_off must lie in (0, 1]");
        if (n_measurements < 1) throw config_error("measurements must be at least 1");
        if (n_trajectories < 1) throw config_error("trajectories must be at least 1");
    }

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view value, const std::string& key) {
    double v = 0.0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
        throw config_error("key '" + key + "': cannot parse '" + std::string(value) +
                           "' as a number");
    return v;
}

inline long parse_count(std::string_view value, const std::string& key) {
    long v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
        throw config_error("key '" + key + "': cannot parse '" + std::string(value) +
                           "' as an integer");
    return v;
}

inline std::uint64_t parse_seed(std::string_view value, const std::string& key) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
        throw config_error("key '" + key + "': cannot parse '" + std::string(value) +
                           "' as an unsigned 64-bit integer");
    return v;
}

} // namespace detail

inline const char* to_string(TrajectoryMode mode) {
    return mode == TrajectoryMode::Markov ? "markov" : "full-quantum";
}

inline TrajectoryMode mode_from_string(std::string_view text) {
    const std::string_view t = detail::trim(text);
    if (t == "markov") return TrajectoryMode::Markov;
    if (t == "full-quantum") return TrajectoryMode::FullQuantum;
    throw config_error("mode must be 'markov' or 'full-quantum', got '" + std::string(t) + "'");
}

// Canonical text form: internal units only, every field explicit, stable
// ordering. parse(serialize(c)) reproduces c bit for bit.
inline std::string serialize_experiment_config(const ExperimentConfig& config) {
    using detail::format_double;
    std::ostringstream out;
    out << "[drive]\n";
    out << "rabi_rad_per_s = " << format_double(config.drive.omega) << '\n';
    out << "detuning_rad_per_s = " << format_double(config.drive.delta) << '\n';
    out << "tau_s = " << format_double(config.drive.tau) << '\n';
    out << "dephasing_rate_per_s = " << format_double(config.drive.gamma_ph) << '\n';
    out << "decay_rate_per_s = " << format_double(config.drive.big_gamma) << '\n';
    out << '\n';
    out << "[detection]\n";
    out << "fidelity_on = " << format_double(config.f0) << '\n';
    out << "fidelity_off = " << format_double(config.f1) << '\n';
    out << '\n';
    out << "[run]\n";
    out << "measurements = " << config.n_measurements << '\n';
    out << "trajectories = " << config.n_trajectories << '\n';
    out << "seed = " << config.seed << '\n';
    out << "mode = " << to_string(config.mode) << '\n';
    return out.str();
}

inline ExperimentConfig parse_experiment_config(const std::string& text) {
    ExperimentConfig out;
    bool saw_rabi_hz = false, saw_rabi_rad = false;
    bool saw_detuning_hz = false, saw_detuning_rad = false;
    bool saw_tau = false;
    std::set<std::string> seen;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    long line_no = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = detail::trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error("line " + std::to_string(line_no) +
                                   ": malformed section header '" + std::string(line) + "'");
            section = std::string(detail::trim(line.substr(1, line.size() - 2)));
            if (section != "drive" && section != "detection" && section != "run")
                throw config_error("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw config_error("line " + std::to_string(line_no) + ": expected 'key = value', got '" +
                               std::string(line) + "'");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw config_error("line " + std::to_string(line_no) + ": empty key");
        if (section.empty())
            throw config_error("line " + std::to_string(line_no) + ": key '" + key +
                               "' appears before any section header");
        const std::string qualified = section + "." + key;
        if (!seen.insert(qualified).second)
            throw config_error("duplicate key '" + qualified + "'");

        if (section == "drive") {
            if (key == "rabi_hz") {
                out.drive.omega = kTwoPi * detail::parse_double(value, qualified);
                saw_rabi_hz = true;
            } else if (key == "rabi_rad_per_s") {
                out.drive.omega = detail::parse_double(value, qualified);
                saw_rabi_rad = true;
            } else if (key == "detuning_hz") {
                out.drive.delta = kTwoPi * detail::parse_double(value, qualified);
                saw_detuning_hz = true;
            } else if (key == "detuning_rad_per_s") {
                out.drive.delta = detail::parse_double(value, qualified);
                saw_detuning_rad = true;
            } else if (key == "tau_s") {
                out.drive.tau = detail::parse_double(value, qualified);
                saw_tau = true;
            } else if (key == "dephasing_rate_per_s") {
                out.drive.gamma_ph = detail::parse_double(value, qualified);
            } else if (key == "decay_rate_per_s") {
                out.drive.big_gamma = detail::parse_double(value, qualified);
            } else {
                throw config_error("unknown key '" + qualified + "'");
            }
        } else if (section == "detection") {
            if (key == "fidelity_on") {
                out.f0 = detail::parse_double(value, qualified);
            } else if (key == "fidelity_off") {
                out.f1 = detail::parse_double(value, qualified);
            } else {
                throw config_error("unknown key '" + qualified + "'");
            }
        } else {
            if (key == "measurements") {
                out.n_measurements = detail::parse_count(value, qualified);
            } else if (key == "trajectories") {
                out.n_trajectories = detail::parse_count(value, qualified);
            } else if (key == "seed") {
                out.seed = detail::parse_seed(value, qualified);
            } else if (key == "mode") {
                out.mode = mode_from_string(value);
            } else {
                throw config_error("unknown key '" + qualified + "'");
            }
        }
    }

    if (saw_rabi_hz && saw_rabi_rad)
        throw config_error("give exactly one of 'drive.rabi_hz' and 'drive.rabi_rad_per_s'");
    if (!saw_rabi_hz && !saw_rabi_rad)
        throw config_error("missing required key: one of 'drive.rabi_hz', 'drive.rabi_rad_per_s'");
    if (saw_detuning_hz && saw_detuning_rad)
        throw config_error("give at most one of 'drive.detuning_hz' and 'drive.detuning_rad_per_s'");
    if (!saw_tau) throw config_error("missing required key 'drive.tau_s'");

    out.validate();
    return out;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_experiment_config(buffer.str());
    } catch (const config_error& e) {
        throw config_error(path + ": " + e.what());
    }
}

} // namespace zeno
