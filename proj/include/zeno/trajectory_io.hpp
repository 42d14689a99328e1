#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "zeno/config.hpp"
#include "zeno/errors.hpp"
#include "zeno/rng.hpp"
#include "zeno/trajectory.hpp"

namespace zeno {

inline constexpr const char* kTrajectoryFileSignature = "# zeno trajectory v1";

struct TrajectoryData {
    ExperimentConfig config;
    std::vector<Trajectory> trajectories;
};

// Text form: a '#'-prefixed header carrying the full experiment config,
// then one line per trajectory with a '0' or '1' per measurement. The
// round trip is exact because the config serialization is.
inline std::string serialize_trajectories(const ExperimentConfig& config,
                                          const std::vector<Trajectory>& trajectories) {
    std::ostringstream out;
    out << kTrajectoryFileSignature << '\n';
    std::istringstream header(serialize_experiment_config(config));
    std::string line;
    while (std::getline(header, line)) {
        if (line.empty())
            out << "#\n";
        else
            out << "# " << line << '\n';
    }
    for (const Trajectory& t : trajectories) {
        for (Outcome o : t.outcomes) out << (o == Outcome::On ? '1' : '0');
        out << '\n';
    }
    return out.str();
}

inline TrajectoryData parse_trajectory_file(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    long line_no = 0;
    bool saw_signature = false;
    bool header_open = true;
    std::string config_text;
    std::vector<std::pair<long, std::string>> records;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1) {
            if (line != kTrajectoryFileSignature)
                throw parse_error("line 1: not a trajectory file (expected '" +
                                  std::string(kTrajectoryFileSignature) + "')");
            saw_signature = true;
            continue;
        }
        if (!line.empty() && line.front() == '#') {
            if (!header_open)
                throw parse_error("line " + std::to_string(line_no) +
                                  ": header line after the first record");
            std::string body = line.substr(1);
            if (!body.empty() && body.front() == ' ') body.erase(0, 1);
            config_text += body;
            config_text += '\n';
            continue;
        }
        if (line.empty()) continue;
        header_open = false;
        records.emplace_back(line_no, line);
    }
    if (!saw_signature) throw parse_error("empty input: not a trajectory file");

    ExperimentConfig config;
    try {
        config = parse_experiment_config(config_text);
    } catch (const config_error& e) {
        throw parse_error(std::string("bad header: ") + e.what());
    }

    if (static_cast<long>(records.size()) != config.n_trajectories)
        throw parse_error("expected " + std::to_string(config.n_trajectories) +
                          " trajectory records, found " + std::to_string(records.size()));

    TrajectoryData out;
    out.config = config;
    out.trajectories.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& [rec_line, body] = records[i];
        if (static_cast<long>(body.size()) != config.n_measurements)
            throw parse_error("line " + std::to_string(rec_line) + ": record has " +
                              std::to_string(body.size()) + " symbols, expected " +
                              std::to_string(config.n_measurements));
        Trajectory t;
        t.outcomes.reserve(body.size());
        for (std::size_t col = 0; col < body.size(); ++col) {
            const char c = body[col];
            if (c != '0' && c != '1')
                throw parse_error("line " + std::to_string(rec_line) + ", column " +
                                  std::to_string(col + 1) + ": invalid symbol '" +
                                  std::string(1, c) + "'");
            t.outcomes.push_back(c == '1' ? Outcome::On : Outcome::Off);
        }
        t.seed = substream_seed(config.seed, i);
        t.config = config.drive;
        t.f0 = config.f0;
        t.f1 = config.f1;
        t.mode = config.mode;
        out.trajectories.push_back(std::move(t));
    }
    return out;
}

inline void write_trajectory_file(const std::string& path, const ExperimentConfig& config,
                                  const std::vector<Trajectory>& trajectories) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parse_error("cannot open '" + path + "' for writing");
    out << serialize_trajectories(config, trajectories);
    if (!out) throw parse_error("failed writing '" + path + "'");
}

inline TrajectoryData read_trajectory_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open trajectory file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_trajectory_file(buffer.str());
    } catch (const parse_error& e) {
        throw parse_error(path + ": " + e.what());
    }
}

} // namespace zeno
