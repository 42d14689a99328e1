#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "zeno/runs.hpp"
#include "zeno/trajectory.hpp"
#include "zeno/trajectory_io.hpp"

using namespace zeno;
using Catch::Matchers::ContainsSubstring;

namespace {

namespace fs = std::filesystem;

struct CliFixture {
    fs::path dir;
    CliFixture() {
        dir = fs::temp_directory_path() / "zeno_cli_test";
        fs::create_directories(dir);
    }
    ~CliFixture() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(ZENO_CLI_PATH) + " " + args;
    const int status = std::system(cmd.c_str());
    if (status < 0) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* kIdleConfig =
    "[drive]\n"
    "rabi_rad_per_s = 0\n"
    "tau_s = 1\n";

const char* kBusyConfig =
    "[drive]\n"
    "rabi_rad_per_s = 2\n"
    "tau_s = 1\n"
    "dephasing_rate_per_s = 0.1\n"
    "decay_rate_per_s = 0.05\n"
    "\n"
    "[detection]\n"
    "fidelity_off = 0.9\n"
    "\n"
    "[run]\n"
    "measurements = 400\n"
    "trajectories = 25\n"
    "seed = 1234\n";

} // namespace

TEST_CASE("an undriven atom stays bright for the default 500 records", "[cli]") {
    CliFixture fx;
    write_text(fx.path("idle.cfg"), kIdleConfig);
    REQUIRE(run_cli("simulate --config " + fx.path("idle.cfg") + " --out " +
                    fx.path("idle.traj") + " 2> /dev/null") == 0);
    const TrajectoryData data = read_trajectory_file(fx.path("idle.traj"));
    CHECK(data.config.n_measurements == 500);
    REQUIRE(data.trajectories.size() == 1);
    REQUIRE(data.trajectories[0].outcomes.size() == 500);
    for (Outcome o : data.trajectories[0].outcomes) REQUIRE(o == Outcome::On);
}

TEST_CASE("simulate is byte-deterministic across runs and thread counts", "[cli]") {
    CliFixture fx;
    write_text(fx.path("busy.cfg"), kBusyConfig);
    for (const char* variant : {"one --threads 1", "two --threads 8", "three --threads 8"}) {
        std::istringstream args(variant);
        std::string name, threads_flag, threads_value;
        args >> name >> threads_flag >> threads_value;
        REQUIRE(run_cli("simulate --config " + fx.path("busy.cfg") + " --out " +
                        fx.path(name + ".traj") + " --threads " + threads_value +
                        " 2> /dev/null") == 0);
    }
    const std::string one = read_text(fx.path("one.traj"));
    CHECK(one == read_text(fx.path("two.traj")));
    CHECK(one == read_text(fx.path("three.traj")));
}

TEST_CASE("files parsed back match the in-memory pipeline exactly", "[cli]") {
    CliFixture fx;
    write_text(fx.path("busy.cfg"), kBusyConfig);
    REQUIRE(run_cli("simulate --config " + fx.path("busy.cfg") + " --out " +
                    fx.path("busy.traj") + " 2> /dev/null") == 0);
    const TrajectoryData data = read_trajectory_file(fx.path("busy.traj"));

    DriveConfig cfg{2.0, 0.0, 1.0, 0.1, 0.05};
    const auto batch =
        generate_batch(cfg, 1.0, 0.9, 400, 25, 1234, TrajectoryMode::Markov, 4);
    REQUIRE(data.trajectories.size() == batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i)
        REQUIRE(data.trajectories[i].outcomes == batch[i].outcomes);

    const RunHistogram from_file = run_lengths(data.trajectories);
    const RunHistogram in_memory = run_lengths(batch);
    CHECK(from_file.counts_on == in_memory.counts_on);
    CHECK(from_file.counts_off == in_memory.counts_off);
}

TEST_CASE("command line overrides replace config values", "[cli]") {
    CliFixture fx;
    write_text(fx.path("busy.cfg"), kBusyConfig);
    REQUIRE(run_cli("simulate --config " + fx.path("busy.cfg") + " --out " +
                    fx.path("o.traj") +
                    " --seed 77 --trajectories 2 --measurements 30 --mode full-quantum"
                    " 2> /dev/null") == 0);
    const TrajectoryData data = read_trajectory_file(fx.path("o.traj"));
    CHECK(data.config.seed == 77);
    CHECK(data.config.n_trajectories == 2);
    CHECK(data.config.n_measurements == 30);
    CHECK(data.config.mode == TrajectoryMode::FullQuantum);
}

TEST_CASE("the analyze table carries the advertised columns only", "[cli]") {
    CliFixture fx;
    write_text(fx.path("busy.cfg"), kBusyConfig);
    REQUIRE(run_cli("simulate --config " + fx.path("busy.cfg") + " --out " +
                    fx.path("busy.traj") + " 2> /dev/null") == 0);
    REQUIRE(run_cli("analyze " + fx.path("busy.traj") + " > " + fx.path("table.txt") +
                    " 2> " + fx.path("diag.txt")) == 0);

    std::istringstream table(read_text(fx.path("table.txt")));
    std::string line;
    REQUIRE(std::getline(table, line));
    CHECK(line == "# q\tU_on\tU_off\tV_on\tV_off\tmodel_on\tmodel_off");
    long rows = 0;
    while (std::getline(table, line)) {
        REQUIRE(!line.empty());
        // Data rows only; diagnostics must be on the error stream.
        REQUIRE((line[0] == '#' || (line[0] >= '0' && line[0] <= '9')));
        if (line[0] != '#') {
            ++rows;
            long tabs = 0;
            for (char c : line)
                if (c == '\t') ++tabs;
            REQUIRE(tabs == 6);
        }
    }
    CHECK(rows >= 5);
    CHECK_THAT(read_text(fx.path("diag.txt")), ContainsSubstring("analyze:"));
}

TEST_CASE("fit subcommand reports the fitted block", "[cli]") {
    CliFixture fx;
    write_text(fx.path("busy.cfg"), kBusyConfig);
    REQUIRE(run_cli("simulate --config " + fx.path("busy.cfg") + " --out " +
                    fx.path("busy.traj") + " --trajectories 100 2> /dev/null") == 0);
    REQUIRE(run_cli("fit " + fx.path("busy.traj") + " > " + fx.path("fit.txt") +
                    " 2> /dev/null") == 0);
    const std::string out = read_text(fx.path("fit.txt"));
    CHECK_THAT(out, ContainsSubstring("# fit theta_rad = "));
    CHECK_THAT(out, ContainsSubstring("# fit theta_sigma = "));
    CHECK_THAT(out, ContainsSubstring("# fit f1 = "));
    CHECK_THAT(out, ContainsSubstring("# fit iterations = "));
}

TEST_CASE("an alternating record makes the fit refuse clearly", "[cli]") {
    CliFixture fx;
    std::string file = std::string(kTrajectoryFileSignature) + "\n";
    std::istringstream cfg(
        "[drive]\n"
        "rabi_rad_per_s = 2\n"
        "tau_s = 1\n"
        "[run]\n"
        "measurements = 8\n"
        "trajectories = 1\n");
    std::string line;
    while (std::getline(cfg, line)) file += "# " + line + "\n";
    file += "10101010\n";
    write_text(fx.path("alt.traj"), file);
    CHECK(run_cli("fit " + fx.path("alt.traj") + " > /dev/null 2> " + fx.path("err.txt")) == 3);
    CHECK_THAT(read_text(fx.path("err.txt")), ContainsSubstring("cannot identify"));
}

TEST_CASE("bad inputs exit nonzero with named diagnostics", "[cli]") {
    CliFixture fx;
    CHECK(run_cli("simulate --config " + fx.path("absent.cfg") + " --out " + fx.path("x") +
                  " 2> " + fx.path("e1.txt")) == 2);
    CHECK_THAT(read_text(fx.path("e1.txt")), ContainsSubstring("absent.cfg"));

    write_text(fx.path("bad.cfg"), std::string(kIdleConfig) + "mystery_knob = 1\n");
    CHECK(run_cli("simulate --config " + fx.path("bad.cfg") + " --out " + fx.path("x") +
                  " 2> " + fx.path("e2.txt")) == 2);
    CHECK_THAT(read_text(fx.path("e2.txt")), ContainsSubstring("mystery_knob"));

    write_text(fx.path("idle.cfg"), kIdleConfig);
    CHECK(run_cli("spectrum --config " + fx.path("idle.cfg") +
                  " --step-hz 0 > /dev/null 2> " + fx.path("e3.txt")) == 2);
    CHECK_THAT(read_text(fx.path("e3.txt")), ContainsSubstring("step-hz"));

    CHECK(run_cli("scaling --n-list 5,0 > /dev/null 2> " + fx.path("e4.txt")) == 2);
    CHECK(run_cli("scaling --n-list 5,x > /dev/null 2> " + fx.path("e5.txt")) == 2);
    CHECK_THAT(read_text(fx.path("e5.txt")), ContainsSubstring("n-list"));

    CHECK(run_cli("frobnicate 2> /dev/null") != 0);
    CHECK(run_cli("simulate 2> /dev/null") != 0);

    write_text(fx.path("mangled.traj"), "# zeno trajectory v1\n# nonsense\n01\n");
    CHECK(run_cli("analyze " + fx.path("mangled.traj") + " > /dev/null 2> " +
                  fx.path("e6.txt")) == 2);
    CHECK_THAT(read_text(fx.path("e6.txt")), ContainsSubstring("bad header"));
}

TEST_CASE("scaling table leads with the exact single-pulse row", "[cli]") {
    CliFixture fx;
    REQUIRE(run_cli("scaling --n-list 1,10,100 --samples 500 --seed 3 --out " +
                    fx.path("scal.txt") + " 2> /dev/null") == 0);
    std::istringstream table(read_text(fx.path("scal.txt")));
    std::string header, row1;
    REQUIRE(std::getline(table, header));
    CHECK(header == "# n\tp_analytic\tp_montecarlo\tstderr\tp_small_angle");
    REQUIRE(std::getline(table, row1));
    std::istringstream cells(row1);
    std::string n, pa, pmc, se, small;
    cells >> n >> pa >> pmc >> se >> small;
    CHECK(n == "1");
    CHECK(pa == "1");
    CHECK(pmc == "1");
    CHECK(small == "2.4674011");
}

TEST_CASE("spectrum is symmetric and centered when asked for a pi pulse", "[cli]") {
    CliFixture fx;
    write_text(fx.path("pi.cfg"),
               "[drive]\n"
               "rabi_rad_per_s = 3.141592653589793\n"
               "tau_s = 1\n"
               "[run]\n"
               "seed = 11\n");
    REQUIRE(run_cli("spectrum --config " + fx.path("pi.cfg") +
                    " --from-hz=-1 --to-hz=1 --step-hz=0.25 --samples 400 --out " +
                    fx.path("spec.txt") + " 2> /dev/null") == 0);
    std::istringstream table(read_text(fx.path("spec.txt")));
    std::string line;
    REQUIRE(std::getline(table, line));
    CHECK(line == "# detuning_hz\tp_analytic\tp_montecarlo\tstderr");
    long rows = 0;
    bool saw_center = false;
    while (std::getline(table, line)) {
        ++rows;
        std::istringstream cells(line);
        std::string hz, pa;
        cells >> hz >> pa;
        if (hz == "0" || hz == "-0") {
            saw_center = true;
            CHECK(pa == "1");
        }
    }
    CHECK(rows == 9);
    CHECK(saw_center);
}
