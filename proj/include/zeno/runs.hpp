#pragma once

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "zeno/errors.hpp"
#include "zeno/trajectory.hpp"

namespace zeno {

// Counts U(q) of maximal uninterrupted stretches of q equal results, kept per
// symbol. Runs touching the trajectory ends are included.
struct RunHistogram {
    std::map<long, long> counts_on;
    std::map<long, long> counts_off;
    long trajectory_length = 0;
    long n_trajectories = 0;

    long u_on(long q) const {
        auto it = counts_on.find(q);
        return it == counts_on.end() ? 0 : it->second;
    }
    long u_off(long q) const {
        auto it = counts_off.find(q);
        return it == counts_off.end() ? 0 : it->second;
    }
    long u(Outcome symbol, long q) const {
        return symbol == Outcome::On ? u_on(q) : u_off(q);
    }

    long max_q() const {
        long m = 0;
        if (!counts_on.empty()) m = std::max(m, counts_on.rbegin()->first);
        if (!counts_off.empty()) m = std::max(m, counts_off.rbegin()->first);
        return m;
    }

    long total_runs(Outcome symbol) const {
        const auto& c = symbol == Outcome::On ? counts_on : counts_off;
        long total = 0;
        for (const auto& [q, n] : c) total += n;
        return total;
    }

    long total_measurements() const {
        long total = 0;
        for (const auto& [q, n] : counts_on) total += q * n;
        for (const auto& [q, n] : counts_off) total += q * n;
        return total;
    }

    // Histograms merge only across trajectories of equal length; counts add.
    void merge(const RunHistogram& other) {
        if (n_trajectories == 0) {
            *this = other;
            return;
        }
        if (other.n_trajectories == 0) return;
        if (other.trajectory_length != trajectory_length)
            throw std::invalid_argument("RunHistogram::merge: trajectory lengths differ");
        for (const auto& [q, n] : other.counts_on) counts_on[q] += n;
        for (const auto& [q, n] : other.counts_off) counts_off[q] += n;
        n_trajectories += other.n_trajectories;
    }
};

// Decomposes one trajectory into maximal runs.
inline RunHistogram run_lengths(const Trajectory& trajectory) {
    const auto& o = trajectory.outcomes;
    if (o.empty()) throw std::invalid_argument("run_lengths: empty trajectory");

    RunHistogram h;
    h.trajectory_length = static_cast<long>(o.size());
    h.n_trajectories = 1;
    std::size_t i = 0;
    while (i < o.size()) {
        std::size_t j = i;
        while (j < o.size() && o[j] == o[i]) ++j;
        auto& counts = (o[i] == Outcome::On) ? h.counts_on : h.counts_off;
        counts[static_cast<long>(j - i)] += 1;
        i = j;
    }
    return h;
}

inline RunHistogram run_lengths(const std::vector<Trajectory>& trajectories) {
    if (trajectories.empty()) throw std::invalid_argument("run_lengths: no trajectories");
    RunHistogram h;
    for (const auto& t : trajectories) h.merge(run_lengths(t));
    return h;
}

// Empirical survival ratio U(q)/U(1); estimates the q-1 step survival.
inline double v_obs(const RunHistogram& hist, Outcome symbol, long q) {
    if (q < 1) throw std::invalid_argument("v_obs: q must be at least 1");
    const long u1 = hist.u(symbol, 1);
    if (u1 == 0)
        throw estimator_error("v_obs: no runs of length 1 for this symbol; ratio undefined");
    return static_cast<double>(hist.u(symbol, q)) / static_cast<double>(u1);
}

// Adjacent-pair transition counts: up = ON followed by OFF (an excitation),
// down = OFF followed by ON.
inline std::pair<long, long> transition_counts(const Trajectory& trajectory) {
    const auto& o = trajectory.outcomes;
    if (o.empty()) throw std::invalid_argument("transition_counts: empty trajectory");
    long up = 0, down = 0;
    for (std::size_t i = 1; i < o.size(); ++i) {
        if (o[i - 1] == Outcome::On && o[i] == Outcome::Off) ++up;
        if (o[i - 1] == Outcome::Off && o[i] == Outcome::On) ++down;
    }
    return {up, down};
}

struct MeasurementRecord {
    Trajectory trajectory;
    long transitions_up = 0;
    long transitions_down = 0;
};

inline MeasurementRecord make_measurement_record(Trajectory trajectory) {
    auto [up, down] = transition_counts(trajectory);
    return {std::move(trajectory), up, down};
}

} // namespace zeno
