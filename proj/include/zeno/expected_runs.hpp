#pragma once

#include <stdexcept>
#include <vector>

#include "zeno/trajectory.hpp"

namespace zeno {

// Expected number of maximal runs of each length for one finite trajectory,
// per symbol. Index q runs from 1 to length.
struct ExpectedRunCounts {
    std::vector<double> on;   // on[q-1] = E[U_on(q)]
    std::vector<double> off;
    long length = 0;

    double at(Outcome symbol, long q) const {
        if (q < 1) throw std::invalid_argument("expected run length must be at least 1");
        if (q > length) return 0.0;
        const auto& v = symbol == Outcome::On ? on : off;
        return v[static_cast<std::size_t>(q - 1)];
    }
};

// Exact finite-length expectation of the run-count table for a two-state
// chain with stay probabilities p0 (in the ON state) and p1 (OFF), length
// recorded steps, prepared in state 0: the first recorded symbol is ON with
// probability p0. Interior runs of symbol s contribute with weight
// p_s^(q-1)(1-p_s)^2 times the entry marginal; runs touching either end lose
// one (1-p) factor; the single full-length run keeps only the entry weight.
// Degenerate p in {0, 1} falls out of the same arithmetic exactly because
// powers are accumulated iteratively (p^0 = 1 even at p = 0).
//
// Cost is O(length) per symbol via prefix sums of the occupation marginals.
inline ExpectedRunCounts expected_run_counts(double p0, double p1, long length) {
    if (length < 1) throw std::invalid_argument("expected_run_counts: length must be at least 1");
    if (!(p0 >= 0.0 && p0 <= 1.0) || !(p1 >= 0.0 && p1 <= 1.0))
        throw std::invalid_argument("expected_run_counts: stay probabilities must lie in [0, 1]");

    const auto n = static_cast<std::size_t>(length);
    // m0[t-1] = P(symbol at step t is ON), t = 1..length.
    std::vector<double> m0(n);
    m0[0] = p0;
    for (std::size_t t = 1; t < n; ++t)
        m0[t] = m0[t - 1] * p0 + (1.0 - m0[t - 1]) * (1.0 - p1);

    // prefix0[T] = sum of m0[0..T-1]; likewise for the OFF marginal.
    std::vector<double> prefix0(n + 1, 0.0), prefix1(n + 1, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        prefix0[t + 1] = prefix0[t] + m0[t];
        prefix1[t + 1] = prefix1[t] + (1.0 - m0[t]);
    }

    ExpectedRunCounts table;
    table.length = length;
    table.on.assign(n, 0.0);
    table.off.assign(n, 0.0);

    struct Side {
        std::vector<double>* out;
        double pi;        // probability the first recorded symbol is this one
        double p_stay;    // stay probability of this symbol
        double p_other;   // stay probability of the other symbol
        const std::vector<double>* other_prefix;
    };

    const double pi_on = p0;
    const Side sides[2] = {
        {&table.on, pi_on, p0, p1, &prefix1},
        {&table.off, 1.0 - pi_on, p1, p0, &prefix0},
    };

    for (const Side& s : sides) {
        double power = 1.0;   // p_stay^(q-1)
        for (long q = 1; q <= length; ++q) {
            const auto qi = static_cast<std::size_t>(q - 1);
            double e = 0.0;
            if (q == length) {
                // One run covering the whole record.
                e = s.pi * power;
            } else {
                // Run starting at step 1, ending inside.
                e += s.pi * power * (1.0 - s.p_stay);
                // Run ending at the last step: entered from the other symbol
                // occupying step length-q.
                const double m_other_entry =
                    (*s.other_prefix)[static_cast<std::size_t>(length - q)] -
                    (*s.other_prefix)[static_cast<std::size_t>(length - q - 1)];
                e += m_other_entry * (1.0 - s.p_other) * power;
                // Interior runs: entry at steps 2..length-q, exit before the end.
                if (length - q - 1 >= 1) {
                    const double entries = (*s.other_prefix)[static_cast<std::size_t>(length - q - 1)];
                    e += entries * (1.0 - s.p_other) * power * (1.0 - s.p_stay);
                }
            }
            (*s.out)[qi] = e;
            power *= s.p_stay;
        }
    }
    return table;
}

} // namespace zeno
