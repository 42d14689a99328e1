#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "zeno/cli.hpp"

namespace {

std::vector<long> parse_n_list(const std::string& text) {
    std::vector<long> values;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string_view item(text.data() + pos, comma - pos);
        long v = 0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (res.ec != std::errc{} || res.ptr != item.data() + item.size())
            throw std::invalid_argument("scaling: cannot parse '" + std::string(item) +
                                        "' in --n-list");
        values.push_back(v);
        pos = comma + 1;
    }
    return values;
}

// Runs a table-producing command with its output on stdout or a file.
template <typename Fn>
void with_table_stream(const std::string& out_path, Fn&& fn) {
    if (out_path.empty()) {
        fn(std::cout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        throw std::invalid_argument("cannot open '" + out_path + "' for writing");
    fn(out);
    if (!out) throw std::runtime_error("failed writing '" + out_path + "'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-level atom under repeated projective probing: simulation and run statistics"};
    app.require_subcommand(1);

    zeno::SimulateOptions sim_opt;
    std::string sim_mode;
    auto* sim = app.add_subcommand("simulate", "Generate measurement trajectories");
    sim->add_option("--config", sim_opt.config_path, "Experiment config file")->required();
    sim->add_option("--out", sim_opt.out_path, "Trajectory file to write")->required();
    sim->add_option("--seed", sim_opt.seed, "Override the config seed");
    sim->add_option("--mode", sim_mode, "Override the config mode: markov or full-quantum");
    sim->add_option("--trajectories", sim_opt.trajectories, "Override the trajectory count");
    sim->add_option("--measurements", sim_opt.measurements, "Override measurements per trajectory");
    sim->add_option("--threads", sim_opt.threads, "Worker threads, 0 means all hardware threads");

    zeno::AnalyzeOptions ana_opt;
    std::string ana_out;
    auto* ana = app.add_subcommand("analyze", "Run-length statistics of trajectory files");
    ana->add_option("files", ana_opt.paths, "Trajectory file(s)")->required();
    ana->add_flag("--fit", ana_opt.with_fit, "Append a maximum likelihood fit block");
    ana->add_option("--out", ana_out, "Write the table here instead of stdout");

    zeno::AnalyzeOptions fit_opt;
    fit_opt.with_fit = true;
    std::string fit_out;
    auto* fit = app.add_subcommand("fit", "Analyze with the fit always on");
    fit->add_option("files", fit_opt.paths, "Trajectory file(s)")->required();
    fit->add_option("--out", fit_out, "Write the table here instead of stdout");

    zeno::SpectrumOptions spec_opt;
    std::string spec_out;
    auto* spec = app.add_subcommand("spectrum", "Excitation probability versus detuning");
    spec->add_option("--config", spec_opt.config_path, "Experiment config file")->required();
    spec->add_option("--from-hz", spec_opt.from_hz, "Scan start in Hz (default -2/tau)");
    spec->add_option("--to-hz", spec_opt.to_hz, "Scan end in Hz (default +2/tau)");
    spec->add_option("--step-hz", spec_opt.step_hz, "Detuning step in Hz (default 20000)");
    spec->add_option("--samples", spec_opt.samples, "Monte Carlo samples per point");
    spec->add_option("--seed", spec_opt.seed, "Override the config seed");
    spec->add_option("--out", spec_out, "Write the table here instead of stdout");

    zeno::ScalingOptions scal_opt;
    std::string scal_out, scal_n_list;
    auto* scal = app.add_subcommand("scaling", "Transition probability versus interruption count");
    scal->add_option("--theta-total", scal_opt.theta_total, "Total nutation angle in radians (default pi)");
    scal->add_option("--n-list", scal_n_list, "Comma-separated interruption counts");
    scal->add_option("--samples", scal_opt.samples, "Monte Carlo samples per count");
    scal->add_option("--seed", scal_opt.seed, "Random seed (default 0)");
    scal->add_option("--out", scal_out, "Write the table here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            if (!sim_mode.empty()) sim_opt.mode = zeno::mode_from_string(sim_mode);
            zeno::run_simulate(sim_opt, std::cerr);
        } else if (*ana) {
            with_table_stream(ana_out,
                              [&](std::ostream& t) { zeno::run_analyze(ana_opt, t, std::cerr); });
        } else if (*fit) {
            with_table_stream(fit_out,
                              [&](std::ostream& t) { zeno::run_analyze(fit_opt, t, std::cerr); });
        } else if (*spec) {
            with_table_stream(spec_out,
                              [&](std::ostream& t) { zeno::run_spectrum(spec_opt, t, std::cerr); });
        } else if (*scal) {
            if (!scal_n_list.empty()) scal_opt.n_values = parse_n_list(scal_n_list);
            with_table_stream(scal_out,
                              [&](std::ostream& t) { zeno::run_scaling(scal_opt, t, std::cerr); });
        }
    } catch (const zeno::fit_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const zeno::config_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const zeno::parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
