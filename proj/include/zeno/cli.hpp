#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "zeno/config.hpp"
#include "zeno/expected_runs.hpp"
#include "zeno/fit.hpp"
#include "zeno/protocol.hpp"
#include "zeno/runs.hpp"
#include "zeno/survival.hpp"
#include "zeno/trajectory.hpp"
#include "zeno/trajectory_io.hpp"

namespace zeno {

namespace detail {

// Table cells are presentation, not archival data: ten significant digits.
inline std::string table_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::string(buf);
}

} // namespace detail

struct SimulateOptions {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<TrajectoryMode> mode;
    std::optional<long> trajectories;
    std::optional<long> measurements;
    unsigned threads = 0;
};

// Generates the configured batch and writes one multi-trajectory file.
inline void run_simulate(const SimulateOptions& opt, std::ostream& diag) {
    ExperimentConfig config = load_experiment_config(opt.config_path);
    if (opt.seed) config.seed = *opt.seed;
    if (opt.mode) config.mode = *opt.mode;
    if (opt.trajectories) config.n_trajectories = *opt.trajectories;
    if (opt.measurements) config.n_measurements = *opt.measurements;
    config.validate();

    const std::vector<Trajectory> batch =
        generate_batch(config.drive, config.f0, config.f1, config.n_measurements,
                       config.n_trajectories, config.seed, config.mode, opt.threads);
    write_trajectory_file(opt.out_path, config, batch);
    diag << "simulate: wrote " << config.n_trajectories << " x " << config.n_measurements
         << " measurements to " << opt.out_path << '\n';
}

struct AnalyzeOptions {
    std::vector<std::string> paths;
    bool with_fit = false;
};

// Emits the run-length table for one or more trajectory files, with the
// header configuration's model curve alongside, and optionally a maximum
// likelihood fit block.
inline void run_analyze(const AnalyzeOptions& opt, std::ostream& table, std::ostream& diag) {
    if (opt.paths.empty())
        throw std::invalid_argument("analyze: at least one trajectory file is required");
    const TrajectoryData first = read_trajectory_file(opt.paths.front());
    RunHistogram hist = run_lengths(first.trajectories);
    for (std::size_t i = 1; i < opt.paths.size(); ++i)
        hist.merge(run_lengths(read_trajectory_file(opt.paths[i]).trajectories));

    const ExperimentConfig& config = first.config;
    const SurvivalModel model = survival_model(config.drive, config.f0, config.f1);
    const auto expect = expected_run_counts(model.p0, model.p1, hist.trajectory_length);

    const double nan = std::nan("");
    const double u_on1 = static_cast<double>(hist.u_on(1));
    const double u_off1 = static_cast<double>(hist.u_off(1));
    const double e_on1 = expect.at(Outcome::On, 1);
    const double e_off1 = expect.at(Outcome::Off, 1);

    using detail::table_number;
    table << "# q\tU_on\tU_off\tV_on\tV_off\tmodel_on\tmodel_off\n";
    for (long q = 1; q <= hist.max_q(); ++q) {
        const double v_on = u_on1 > 0 ? static_cast<double>(hist.u_on(q)) / u_on1 : nan;
        const double v_off = u_off1 > 0 ? static_cast<double>(hist.u_off(q)) / u_off1 : nan;
        const double m_on = e_on1 > 0 ? expect.at(Outcome::On, q) / e_on1 : nan;
        const double m_off = e_off1 > 0 ? expect.at(Outcome::Off, q) / e_off1 : nan;
        table << q << '\t' << hist.u_on(q) << '\t' << hist.u_off(q) << '\t'
              << table_number(v_on) << '\t' << table_number(v_off) << '\t'
              << table_number(m_on) << '\t' << table_number(m_off) << '\n';
    }
    diag << "analyze: " << hist.n_trajectories << " trajectories, "
         << hist.total_measurements() << " measurements, longest run " << hist.max_q()
         << '\n';

    if (!opt.with_fit) return;
    const FitResult fit = fit_survival(hist, config.drive);
    table << "# fit theta_rad = " << table_number(fit.theta_hat) << '\n';
    table << "# fit theta_sigma = " << table_number(fit.theta_sigma()) << '\n';
    table << "# fit f0 = " << table_number(fit.f0_hat) << '\n';
    table << "# fit f0_sigma = " << table_number(std::sqrt(fit.covariance[1][1])) << '\n';
    table << "# fit f1 = " << table_number(fit.f1_hat) << '\n';
    table << "# fit f1_sigma = " << table_number(std::sqrt(fit.covariance[2][2])) << '\n';
    table << "# fit p0 = " << table_number(fit.p0_hat) << '\n';
    table << "# fit p1 = " << table_number(fit.p1_hat) << '\n';
    table << "# fit objective = " << table_number(fit.objective) << '\n';
    table << "# fit iterations = " << fit.iterations << '\n';
    const auto residuals = log_vobs_residuals(hist, fit.p0_hat, fit.p1_hat);
    double worst = 0.0;
    for (const auto& r : residuals) worst = std::max(worst, std::abs(r.log_residual));
    diag << "fit: converged after " << fit.iterations << " iterations, "
         << residuals.size() << " diagnostic ratio points, worst |log residual| "
         << table_number(worst) << '\n';
}

struct SpectrumOptions {
    std::string config_path;
    std::optional<double> from_hz;
    std::optional<double> to_hz;
    double step_hz = 20000.0;
    long samples = 10000;
    std::optional<std::uint64_t> seed;
};

// Stroboscopic response: per-pulse excitation probability versus drive
// detuning, analytic curve next to a Monte Carlo estimate.
inline void run_spectrum(const SpectrumOptions& opt, std::ostream& table, std::ostream& diag) {
    ExperimentConfig config = load_experiment_config(opt.config_path);
    if (opt.seed) config.seed = *opt.seed;
    if (!(opt.step_hz > 0.0))
        throw std::invalid_argument("spectrum: --step-hz must be positive");
    if (opt.samples < 1) throw std::invalid_argument("spectrum: --samples must be at least 1");

    const double span_hz = 2.0 / config.drive.tau;
    const double from_hz = opt.from_hz.value_or(-span_hz);
    const double to_hz = opt.to_hz.value_or(span_hz);
    if (!(from_hz < to_hz)) throw std::invalid_argument("spectrum: empty scan range");

    const auto rows = spectrum_scan(config.drive, kTwoPi * from_hz, kTwoPi * to_hz,
                                    kTwoPi * opt.step_hz, opt.samples, config.seed);
    using detail::table_number;
    table << "# detuning_hz\tp_analytic\tp_montecarlo\tstderr\n";
    for (const auto& row : rows)
        table << table_number(row.delta / kTwoPi) << '\t' << table_number(row.p_analytic)
              << '\t' << table_number(row.p_mc) << '\t' << table_number(row.stderr_mc)
              << '\n';
    diag << "spectrum: " << rows.size() << " detuning points, " << opt.samples
         << " samples each\n";
}

struct ScalingOptions {
    double theta_total = 3.14159265358979323846;
    std::vector<long> n_values{1, 2, 5, 10, 20, 50, 100, 200, 500, 1000};
    long samples = 10000;
    std::uint64_t seed = 0;
};

// Freezing of the interrupted nutation: transition probability against the
// number of equal slices, with the quadratic short-pulse approximation for
// comparison.
inline void run_scaling(const ScalingOptions& opt, std::ostream& table, std::ostream& diag) {
    const auto rows = zeno_scan(opt.theta_total, opt.n_values, opt.samples, opt.seed);
    using detail::table_number;
    table << "# n\tp_analytic\tp_montecarlo\tstderr\tp_small_angle\n";
    for (const auto& row : rows) {
        const double small_angle =
            opt.theta_total * opt.theta_total / (4.0 * static_cast<double>(row.n));
        table << row.n << '\t' << table_number(row.p_analytic) << '\t'
              << table_number(row.p_mc) << '\t' << table_number(row.stderr_mc) << '\t'
              << table_number(small_angle) << '\n';
    }
    diag << "scaling: " << rows.size() << " interruption counts, " << opt.samples
         << " samples each\n";
}

} // namespace zeno
