#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <string>

#include "zeno/config.hpp"
#include "zeno/trajectory.hpp"
#include "zeno/trajectory_io.hpp"

using namespace zeno;
using Catch::Matchers::ContainsSubstring;

namespace {
ExperimentConfig sample_config() {
    ExperimentConfig c;
    c.drive.omega = 2000.0 * kTwoPi;
    c.drive.delta = -37.5;
    c.drive.tau = 1.0 / 3.0;
    c.drive.gamma_ph = 0.1;
    c.drive.big_gamma = 0.05;
    c.f0 = 0.998;
    c.f1 = 0.9;
    c.n_measurements = 41;
    c.n_trajectories = 3;
    c.seed = 18446744073709551557ULL;
    c.mode = TrajectoryMode::FullQuantum;
    return c;
}
} // namespace

TEST_CASE("config serialization round-trips bit-exactly", "[io]") {
    const ExperimentConfig original = sample_config();
    const std::string text = serialize_experiment_config(original);
    const ExperimentConfig back = parse_experiment_config(text);
    CHECK(back == original);
    // Serializing the parsed copy reproduces the same bytes.
    CHECK(serialize_experiment_config(back) == text);
}

TEST_CASE("hertz keys convert exactly once", "[io]") {
    const std::string hz_text =
        "[drive]\n"
        "rabi_hz = 1250.5\n"
        "detuning_hz = -40\n"
        "tau_s = 0.001\n";
    const ExperimentConfig from_hz = parse_experiment_config(hz_text);
    CHECK(from_hz.drive.omega == kTwoPi * 1250.5);
    CHECK(from_hz.drive.delta == kTwoPi * -40.0);

    // The same numbers pre-converted to internal units parse to the
    // identical configuration, bit for bit.
    const std::string rad_text =
        "[drive]\n"
        "rabi_rad_per_s = " + detail::format_double(kTwoPi * 1250.5) + "\n" +
        "detuning_rad_per_s = " + detail::format_double(kTwoPi * -40.0) + "\n" +
        "tau_s = 0.001\n";
    const ExperimentConfig from_rad = parse_experiment_config(rad_text);
    CHECK(from_rad == from_hz);
}

TEST_CASE("a minimal config fills the documented defaults", "[io]") {
    const ExperimentConfig c = parse_experiment_config(
        "[drive]\n"
        "rabi_hz = 100\n"
        "tau_s = 0.002\n");
    CHECK(c.drive.delta == 0.0);
    CHECK(c.drive.gamma_ph == 0.0);
    CHECK(c.drive.big_gamma == 0.0);
    CHECK(c.f0 == 1.0);
    CHECK(c.f1 == 1.0);
    CHECK(c.n_measurements == 500);
    CHECK(c.n_trajectories == 1);
    CHECK(c.seed == 0);
    CHECK(c.mode == TrajectoryMode::Markov);
}

TEST_CASE("comments and spacing are tolerated", "[io]") {
    const ExperimentConfig c = parse_experiment_config(
        "# a comment\n"
        "; another comment style\n"
        "\n"
        "[drive]\n"
        "  rabi_rad_per_s   =  2.5  \n"
        "\ttau_s=1\n"
        "[run]\n"
        "seed = 7\n");
    CHECK(c.drive.omega == 2.5);
    CHECK(c.drive.tau == 1.0);
    CHECK(c.seed == 7);
}

TEST_CASE("strict parsing rejects malformed configs by name", "[io]") {
    const std::string base = "[drive]\nrabi_hz = 10\ntau_s = 1\n";
    CHECK_THROWS_WITH(parse_experiment_config(base + "typo_key = 3\n"),
                      ContainsSubstring("drive.typo_key"));
    CHECK_THROWS_WITH(parse_experiment_config(base + "[nonsense]\n"),
                      ContainsSubstring("nonsense"));
    CHECK_THROWS_WITH(parse_experiment_config(base + "tau_s = 2\n"),
                      ContainsSubstring("duplicate key 'drive.tau_s'"));
    CHECK_THROWS_WITH(parse_experiment_config(base + "rabi_rad_per_s = 1\n"),
                      ContainsSubstring("exactly one"));
    CHECK_THROWS_WITH(parse_experiment_config("[drive]\ntau_s = 1\n"),
                      ContainsSubstring("rabi"));
    CHECK_THROWS_WITH(parse_experiment_config("[drive]\nrabi_hz = 10\n"),
                      ContainsSubstring("tau_s"));
    CHECK_THROWS_WITH(parse_experiment_config(base + "dephasing_rate_per_s = fast\n"),
                      ContainsSubstring("cannot parse 'fast'"));
    CHECK_THROWS_WITH(parse_experiment_config("rabi_hz = 10\n"),
                      ContainsSubstring("before any section"));
    CHECK_THROWS_WITH(parse_experiment_config(base + "[run]\nmode = quantum\n"),
                      ContainsSubstring("markov"));
    CHECK_THROWS_WITH(parse_experiment_config(base + "[run]\nmeasurements = 0\n"),
                      ContainsSubstring("measurements"));
    CHECK_THROWS_WITH(parse_experiment_config(base + "[detection]\nfidelity_on = 1.5\n"),
                      ContainsSubstring("fidelity_on"));
    CHECK_THROWS_AS(parse_experiment_config(base + "bare line\n"), config_error);
}

TEST_CASE("mode names round trip", "[io]") {
    CHECK(mode_from_string(to_string(TrajectoryMode::Markov)) == TrajectoryMode::Markov);
    CHECK(mode_from_string(to_string(TrajectoryMode::FullQuantum)) ==
          TrajectoryMode::FullQuantum);
    CHECK_THROWS_AS(mode_from_string("both"), config_error);
}

TEST_CASE("trajectory files round trip bit-exactly", "[io]") {
    ExperimentConfig config = sample_config();
    config.mode = TrajectoryMode::Markov;
    const auto batch = generate_batch(config.drive, config.f0, config.f1,
                                      config.n_measurements, config.n_trajectories,
                                      config.seed, config.mode, 2);
    const std::string text = serialize_trajectories(config, batch);
    const TrajectoryData data = parse_trajectory_file(text);

    CHECK(data.config == config);
    REQUIRE(data.trajectories.size() == batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        CHECK(data.trajectories[i].outcomes == batch[i].outcomes);
        CHECK(data.trajectories[i].seed == batch[i].seed);
        CHECK(data.trajectories[i].seed == substream_seed(config.seed, i));
        CHECK(data.trajectories[i].config == config.drive);
        CHECK(data.trajectories[i].f0 == config.f0);
        CHECK(data.trajectories[i].f1 == config.f1);
        CHECK(data.trajectories[i].mode == config.mode);
    }
    // Serialize of the parse reproduces identical bytes.
    CHECK(serialize_trajectories(data.config, data.trajectories) == text);
}

TEST_CASE("malformed trajectory files fail with located errors", "[io]") {
    ExperimentConfig config = sample_config();
    config.n_measurements = 5;
    config.n_trajectories = 2;
    const std::vector<Trajectory> batch = [&] {
        return generate_batch(config.drive, config.f0, config.f1, 5, 2, 1,
                              TrajectoryMode::Markov, 1);
    }();
    const std::string good = serialize_trajectories(config, batch);

    CHECK_THROWS_WITH(parse_trajectory_file("hello\n"),
                      ContainsSubstring("line 1"));
    CHECK_THROWS_AS(parse_trajectory_file(""), parse_error);

    std::string bad_symbol = good;
    bad_symbol[bad_symbol.size() - 3] = 'x';
    CHECK_THROWS_WITH(parse_trajectory_file(bad_symbol),
                      ContainsSubstring("invalid symbol 'x'"));
    CHECK_THROWS_WITH(parse_trajectory_file(bad_symbol), ContainsSubstring("column 4"));

    std::string short_record = good;
    short_record.erase(short_record.size() - 2, 1);
    CHECK_THROWS_WITH(parse_trajectory_file(short_record),
                      ContainsSubstring("expected 5"));

    std::string missing_record = good;
    missing_record.erase(missing_record.size() - 6, 6);
    CHECK_THROWS_WITH(parse_trajectory_file(missing_record),
                      ContainsSubstring("found 1"));

    const std::string late_header = good + "# trailing header\n";
    CHECK_THROWS_WITH(parse_trajectory_file(late_header),
                      ContainsSubstring("header line after"));

    std::string bad_header = good;
    const auto pos = bad_header.find("# tau_s");
    bad_header.replace(pos, 7, "# tau_x");
    CHECK_THROWS_WITH(parse_trajectory_file(bad_header), ContainsSubstring("bad header"));
}

TEST_CASE("files are written and read back through the filesystem", "[io]") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "zeno_io_test";
    fs::create_directories(dir);

    ExperimentConfig config = sample_config();
    config.mode = TrajectoryMode::Markov;
    config.n_measurements = 11;
    config.n_trajectories = 4;
    const auto batch = generate_batch(config.drive, config.f0, config.f1, 11, 4,
                                      config.seed, config.mode, 2);

    const std::string path = (dir / "sample.traj").string();
    write_trajectory_file(path, config, batch);
    const TrajectoryData data = read_trajectory_file(path);
    CHECK(data.config == config);
    CHECK(data.trajectories.size() == 4);

    CHECK_THROWS_WITH(read_trajectory_file((dir / "absent.traj").string()),
                      ContainsSubstring("absent.traj"));
    CHECK_THROWS_WITH(load_experiment_config((dir / "absent.cfg").string()),
                      ContainsSubstring("absent.cfg"));

    fs::remove_all(dir);
}
