#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "zeno/bloch.hpp"
#include "zeno/rng.hpp"
#include "zeno/survival.hpp"
#include "zeno/trajectory.hpp"

namespace zeno {

// Lets the system run q drive pulses back-to-back as one coherent evolution
// of duration q*tau (no intervening projection), then measures once.
inline Outcome evolve_unobserved(const DriveConfig& cfg, long q, std::uint64_t seed) {
    cfg.validate();
    if (q < 0) throw std::invalid_argument("evolve_unobserved: q must be non-negative");
    const BlochState end =
        bloch_propagate(ground_state(), cfg, static_cast<double>(q) * cfg.tau);
    RandomStream rng(seed);
    return measure_once(end, rng).first;
}

// Frequency of ON over `samples` independent repetitions of
// evolve_unobserved(cfg, q, substream_seed(master_seed, i)). The evolution is
// deterministic, so it is integrated once and only the projection is drawn
// per sample; the draws are bit-identical to calling evolve_unobserved in a
// loop with those seeds.
struct UnobservedEstimate {
    double on_frequency = 0.0;
    double analytic = 0.0;     // survival of state 0 from the integrated state
    long samples = 0;
};

inline UnobservedEstimate unobserved_survival_estimate(const DriveConfig& cfg, long q,
                                                       long samples,
                                                       std::uint64_t master_seed) {
    cfg.validate();
    if (q < 0) throw std::invalid_argument("unobserved_survival_estimate: q must be non-negative");
    if (samples < 1)
        throw std::invalid_argument("unobserved_survival_estimate: samples must be at least 1");
    const BlochState end =
        bloch_propagate(ground_state(), cfg, static_cast<double>(q) * cfg.tau);
    const double p_on = std::clamp(0.5 * (1.0 - end.w), 0.0, 1.0);
    long on = 0;
    for (long i = 0; i < samples; ++i) {
        RandomStream rng(substream_seed(master_seed, static_cast<std::uint64_t>(i)));
        if (rng.uniform() < p_on) ++on;
    }
    return {static_cast<double>(on) / static_cast<double>(samples), p_on, samples};
}

struct ZenoScanRow {
    long n = 0;                // number of interruptions of the total pulse
    double p_analytic = 0.0;   // 1 - cos^(2N)(theta_total / 2N)
    double p_mc = 0.0;         // Monte Carlo frequency of at least one OFF
    double stderr_mc = 0.0;
    long samples = 0;
};

// Splits the total nutation angle into N equal measured pulses and reports
// the probability that the system is caught outside state 0 at least once.
// Row r uses master substream r; sample i within a row uses a nested
// substream, so rows and samples are scheduling-independent.
inline std::vector<ZenoScanRow> zeno_scan(double theta_total,
                                          const std::vector<long>& n_values, long samples,
                                          std::uint64_t master_seed) {
    if (!(theta_total > 0.0) || !std::isfinite(theta_total))
        throw std::invalid_argument("zeno_scan: theta_total must be positive and finite");
    if (samples < 1) throw std::invalid_argument("zeno_scan: samples must be at least 1");
    for (long n : n_values)
        if (n < 1) throw std::invalid_argument("zeno_scan: every N must be at least 1");

    std::vector<ZenoScanRow> rows;
    rows.reserve(n_values.size());
    for (std::size_t r = 0; r < n_values.size(); ++r) {
        const long n = n_values[r];
        const double theta_step = theta_total / static_cast<double>(n);
        const double stay = survival_measured_ideal(1, theta_step);
        const std::uint64_t row_seed = substream_seed(master_seed, static_cast<std::uint64_t>(r));

        long flipped = 0;
        for (long i = 0; i < samples; ++i) {
            RandomStream rng(substream_seed(row_seed, static_cast<std::uint64_t>(i)));
            for (long k = 0; k < n; ++k) {
                if (!(rng.uniform() < stay)) {
                    ++flipped;
                    break;
                }
            }
        }
        ZenoScanRow row;
        row.n = n;
        row.p_analytic = 1.0 - survival_measured_ideal(n, theta_step);
        row.p_mc = static_cast<double>(flipped) / static_cast<double>(samples);
        row.stderr_mc = std::sqrt(row.p_mc * (1.0 - row.p_mc) / static_cast<double>(samples));
        row.samples = samples;
        rows.push_back(row);
    }
    return rows;
}

struct SpectrumRow {
    double delta = 0.0;        // rad/s
    double p_analytic = 0.0;
    double p_mc = 0.0;
    double stderr_mc = 0.0;
};

// Sweeps the detuning and estimates the per-pulse excitation probability at
// each point: one drive pulse from the ground state followed by one
// projection, Monte Carlo over `samples` repetitions, next to the analytic
// value. Stroboscopic structure appears because every point samples the
// nutation at the fixed pulse length.
inline std::vector<SpectrumRow> spectrum_scan(const DriveConfig& cfg_base, double delta_min,
                                              double delta_max, double step, long samples,
                                              std::uint64_t master_seed) {
    cfg_base.validate();
    if (!(step > 0.0) || !std::isfinite(step))
        throw std::invalid_argument("spectrum_scan: step must be positive");
    if (!(delta_min < delta_max))
        throw std::invalid_argument("spectrum_scan: delta_min must be below delta_max");
    if (samples < 1) throw std::invalid_argument("spectrum_scan: samples must be at least 1");

    const auto n_points =
        static_cast<long>(std::floor((delta_max - delta_min) / step + 1.0 + 1e-9));
    std::vector<SpectrumRow> rows;
    rows.reserve(static_cast<std::size_t>(n_points));
    for (long k = 0; k < n_points; ++k) {
        DriveConfig cfg = cfg_base;
        cfg.delta = delta_min + static_cast<double>(k) * step;
        // The pulse evolution is deterministic; its excitation probability
        // fully determines the projection draw for each sample.
        const double p = excitation_probability(cfg);
        const std::uint64_t row_seed = substream_seed(master_seed, static_cast<std::uint64_t>(k));
        long excited = 0;
        for (long i = 0; i < samples; ++i) {
            RandomStream rng(substream_seed(row_seed, static_cast<std::uint64_t>(i)));
            if (rng.uniform() < p) ++excited;
        }
        SpectrumRow row;
        row.delta = cfg.delta;
        row.p_analytic = p;
        row.p_mc = static_cast<double>(excited) / static_cast<double>(samples);
        row.stderr_mc = std::sqrt(row.p_mc * (1.0 - row.p_mc) / static_cast<double>(samples));
        rows.push_back(row);
    }
    return rows;
}

} // namespace zeno
