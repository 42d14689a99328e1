#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "zeno/bloch.hpp"
#include "zeno/rng.hpp"
#include "zeno/survival.hpp"

namespace zeno {

// ON means the probe saw fluorescence, i.e. the projection landed in state 0;
// OFF is the null result, state 1.
enum class Outcome : int { Off = 0, On = 1 };

inline Outcome flip(Outcome o) noexcept { return o == Outcome::On ? Outcome::Off : Outcome::On; }

enum class TrajectoryMode { Markov, FullQuantum };

struct Trajectory {
    std::vector<Outcome> outcomes;
    std::uint64_t seed = 0;
    DriveConfig config;
    double f0 = 1.0;
    double f1 = 1.0;
    TrajectoryMode mode = TrajectoryMode::Markov;
};

// One projective probe. Draws ON with probability (1-w)/2 and returns the
// matching projected eigenstate. Consumes exactly one uniform.
inline std::pair<Outcome, BlochState> measure_once(const BlochState& state, RandomStream& rng) {
    if (!std::isfinite(state.u) || !std::isfinite(state.v) || !std::isfinite(state.w))
        throw std::invalid_argument("measure_once: state has non-finite fields");
    if (state.w < -1.0 - 1e-9 || state.w > 1.0 + 1e-9)
        throw std::invalid_argument("measure_once: inversion outside [-1, 1]");
    const double p_on = std::clamp(0.5 * (1.0 - state.w), 0.0, 1.0);
    if (rng.uniform() < p_on) return {Outcome::On, ground_state()};
    return {Outcome::Off, excited_state()};
}

// Generates one trajectory of n measurements starting from the ground state.
//
// MARKOV drives a two-state chain on the recorded symbols with the stay
// probabilities of survival_model (readout factors folded in); one uniform
// per measurement. FULL_QUANTUM propagates the Bloch state through each
// drive pulse, projects, then possibly misrecords the symbol with
// probability 1-f_i while the physical state keeps the projection; exactly
// two uniforms per measurement. The seed feeds the stream directly, so a
// trajectory is reproducible from its own seed field.
inline Trajectory generate_trajectory(const DriveConfig& cfg, double f0, double f1,
                                      long n, std::uint64_t seed, TrajectoryMode mode) {
    cfg.validate();
    if (n < 1) throw std::invalid_argument("generate_trajectory: n must be at least 1");

    Trajectory t;
    t.outcomes.reserve(static_cast<std::size_t>(n));
    t.seed = seed;
    t.config = cfg;
    t.f0 = f0;
    t.f1 = f1;
    t.mode = mode;

    RandomStream rng(seed);
    if (mode == TrajectoryMode::Markov) {
        const SurvivalModel m = survival_model(cfg, f0, f1);
        // Anchor at the prepared state 0; the first recorded symbol already
        // reflects one drive pulse, so it is ON with probability p0.
        Outcome sym = Outcome::On;
        for (long i = 0; i < n; ++i) {
            const double stay = (sym == Outcome::On) ? m.p0 : m.p1;
            if (!(rng.uniform() < stay)) sym = flip(sym);
            t.outcomes.push_back(sym);
        }
    } else {
        if (!(f0 > 0.0 && f0 <= 1.0) || !(f1 > 0.0 && f1 <= 1.0))
            throw std::invalid_argument("generate_trajectory: fidelities must lie in (0, 1]");
        // After every projection the state is one of the two eigenstates, so
        // the pulse map has only two possible inputs; computing both once is
        // bit-identical to propagating every pulse.
        const BlochState from_ground = bloch_propagate(ground_state(), cfg, cfg.tau);
        const BlochState from_excited = bloch_propagate(excited_state(), cfg, cfg.tau);
        bool in_ground = true;
        for (long i = 0; i < n; ++i) {
            const BlochState& evolved = in_ground ? from_ground : from_excited;
            auto [outcome, projected] = measure_once(evolved, rng);
            const double fid = (outcome == Outcome::On) ? f0 : f1;
            const double u = rng.uniform();
            t.outcomes.push_back(u < fid ? outcome : flip(outcome));
            in_ground = (projected.w < 0.0);
        }
    }
    return t;
}

// Batch of trajectories under one master seed. Trajectory i uses
// substream_seed(master, i) as its own seed, so the result is independent of
// thread count and scheduling, and any single trajectory can be regenerated
// standalone from its seed field.
inline std::vector<Trajectory> generate_batch(const DriveConfig& cfg, double f0, double f1,
                                              long n, long n_trajectories,
                                              std::uint64_t master_seed, TrajectoryMode mode,
                                              unsigned n_threads = 0) {
    cfg.validate();
    if (n_trajectories < 1)
        throw std::invalid_argument("generate_batch: n_trajectories must be at least 1");
    if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(
        std::min<long>(n_trajectories, static_cast<long>(n_threads)));

    std::vector<Trajectory> out(static_cast<std::size_t>(n_trajectories));
    std::atomic<long> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const long i = next.fetch_add(1);
            if (i >= n_trajectories) return;
            try {
                out[static_cast<std::size_t>(i)] = generate_trajectory(
                    cfg, f0, f1, n, substream_seed(master_seed, static_cast<std::uint64_t>(i)),
                    mode);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

} // namespace zeno
