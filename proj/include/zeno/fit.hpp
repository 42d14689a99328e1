#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "zeno/errors.hpp"
#include "zeno/expected_runs.hpp"
#include "zeno/optimize.hpp"
#include "zeno/runs.hpp"
#include "zeno/survival.hpp"

namespace zeno {

struct FitOptions {
    bool fit_f0 = false;
    bool fit_f1 = true;
    double f0_fixed = 1.0;
    double f1_fixed = 1.0;
    double min_expected_per_bin = 5.0;
    long max_iterations = 2000;
    double theta_min = 1e-3;
    double theta_max = 3.14159265358979323846;
};

struct FitResult {
    double theta_hat = 0.0;
    double f0_hat = 1.0;
    double f1_hat = 1.0;
    double p0_hat = 0.0;
    double p1_hat = 0.0;
    double objective = 0.0;
    // Parameter order: theta, f0, f1. Fixed parameters keep zero rows.
    std::array<std::array<double, 3>, 3> covariance{};
    long iterations = 0;
    bool converged = false;

    double theta_sigma() const { return std::sqrt(covariance[0][0]); }
};

// Closed-form warm start: with m observed runs of one symbol covering n
// measurements in total, the maximum likelihood stay probability of the
// underlying geometric law is (n - m) / n.
inline double geometric_stay_estimate(const std::map<long, long>& run_counts) {
    long total = 0, runs = 0;
    for (const auto& [q, u] : run_counts) {
        total += q * u;
        runs += u;
    }
    if (runs == 0) throw estimator_error("no runs to estimate a stay probability from");
    return static_cast<double>(total - runs) / static_cast<double>(total);
}

namespace detail {

// Group run lengths 1..L into contiguous bins, each carrying at least
// min_expected counts under the reference expectation. A thin leftover
// tail joins the final bin instead of standing alone.
inline std::vector<std::pair<long, long>> plan_bins(const std::vector<double>& expected,
                                                    double min_expected) {
    std::vector<std::pair<long, long>> ranges;
    const long length = static_cast<long>(expected.size());
    long lo = 1;
    double acc = 0.0;
    for (long q = 1; q <= length; ++q) {
        acc += expected[q - 1];
        if (acc >= min_expected) {
            ranges.emplace_back(lo, q);
            lo = q + 1;
            acc = 0.0;
        }
    }
    if (lo <= length) {
        if (ranges.empty())
            ranges.emplace_back(lo, length);
        else
            ranges.back().second = length;
    }
    return ranges;
}

struct SymbolBins {
    std::vector<std::pair<long, long>> ranges;  // inclusive q intervals covering 1..L
    std::vector<double> observed;
    double observed_total = 0.0;
};

inline SymbolBins bin_symbol(const std::vector<double>& reference_expected,
                             const std::map<long, long>& counts, double min_expected) {
    SymbolBins sb;
    sb.ranges = plan_bins(reference_expected, min_expected);
    sb.observed.assign(sb.ranges.size(), 0.0);
    for (const auto& [q, u] : counts) {
        for (std::size_t i = 0; i < sb.ranges.size(); ++i) {
            if (q >= sb.ranges[i].first && q <= sb.ranges[i].second) {
                sb.observed[i] += static_cast<double>(u);
                break;
            }
        }
    }
    for (double v : sb.observed) sb.observed_total += v;
    return sb;
}

// Conditional multinomial negative log-likelihood of the binned run counts.
// Each symbol's counts are compared against the model bin probabilities given
// that symbol's total, which keeps trajectory-to-trajectory fluctuations of
// the totals out of the objective.
struct RunCountLikelihood {
    const RunHistogram* hist = nullptr;
    DriveConfig base{};
    SymbolBins on, off;
    double theta_lo = 0.0, theta_hi = 0.0;
    double fidelity_cap = 1.0;

    static constexpr double kBarrier = 1e50;

    double operator()(double theta, double f0, double f1) const {
        if (!(theta > theta_lo) || !(theta <= theta_hi)) return kBarrier;
        if (!(f0 > 0.0) || f0 > fidelity_cap) return kBarrier;
        if (!(f1 > 0.0) || f1 > fidelity_cap) return kBarrier;
        DriveConfig cfg = base;
        cfg.omega = theta / cfg.tau;
        const SurvivalModel bare = survival_model(cfg, 1.0, 1.0);
        const double p0 = std::clamp(1.0 - f0 * (1.0 - bare.p0), 0.0, 1.0);
        const double p1 = std::clamp(1.0 - f1 * (1.0 - bare.p1), 0.0, 1.0);
        const auto expect = expected_run_counts(p0, p1, hist->trajectory_length);
        return symbol_term(expect.on, on) + symbol_term(expect.off, off);
    }

    static double symbol_term(const std::vector<double>& expected, const SymbolBins& bins) {
        if (bins.observed_total <= 0.0 || bins.ranges.size() < 2) return 0.0;
        double total = 0.0;
        std::vector<double> mass(bins.ranges.size(), 0.0);
        for (std::size_t i = 0; i < bins.ranges.size(); ++i) {
            for (long q = bins.ranges[i].first; q <= bins.ranges[i].second; ++q)
                mass[i] += expected[q - 1];
            total += mass[i];
        }
        if (!(total > 0.0)) return kBarrier;
        double nll = 0.0;
        for (std::size_t i = 0; i < mass.size(); ++i) {
            if (bins.observed[i] <= 0.0) continue;
            if (!(mass[i] > 0.0)) return kBarrier;
            nll -= bins.observed[i] * std::log(mass[i] / total);
        }
        return nll;
    }
};

// Gauss-Jordan inverse of a small symmetric matrix; empty result means singular.
inline std::vector<std::vector<double>> invert_small(std::vector<std::vector<double>> m) {
    const std::size_t k = m.size();
    std::vector<std::vector<double>> inv(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) inv[i][i] = 1.0;
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        if (!(std::abs(m[pivot][col]) > 0.0)) return {};
        std::swap(m[pivot], m[col]);
        std::swap(inv[pivot], inv[col]);
        const double d = m[col][col];
        for (std::size_t c = 0; c < k; ++c) {
            m[col][c] /= d;
            inv[col][c] /= d;
        }
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col) continue;
            const double factor = m[r][col];
            if (factor == 0.0) continue;
            for (std::size_t c = 0; c < k; ++c) {
                m[r][c] -= factor * m[col][c];
                inv[r][c] -= factor * inv[col][c];
            }
        }
    }
    return inv;
}

} // namespace detail

// Maximum likelihood fit of the per-pulse model to an observed run-length
// histogram. The drive angle is always estimated; the readout fidelities are
// estimated or held fixed according to the options. Relaxation rates and
// pulse length come from cfg_known; its Rabi frequency entry is ignored.
inline FitResult fit_survival(const RunHistogram& hist, const DriveConfig& cfg_known,
                              const FitOptions& options = {}) {
    if (hist.trajectory_length < 1 || hist.n_trajectories < 1)
        throw std::invalid_argument("fit_survival: histogram lacks trajectory provenance");
    if (hist.total_runs(Outcome::On) + hist.total_runs(Outcome::Off) == 0)
        throw std::invalid_argument("fit_survival: histogram is empty");
    if (!(cfg_known.tau > 0.0))
        throw std::invalid_argument("fit_survival: pulse length must be positive");
    if (!(options.theta_min > 0.0) || !(options.theta_max > options.theta_min))
        throw std::invalid_argument("fit_survival: bad theta bounds");

    auto distinct_lengths = [](const std::map<long, long>& counts) {
        long k = 0;
        for (const auto& [q, u] : counts)
            if (u > 0) ++k;
        return k;
    };
    if (distinct_lengths(hist.counts_on) < 2 || distinct_lengths(hist.counts_off) < 2)
        throw fit_error(
            "fit_survival: need at least two distinct run lengths per symbol; "
            "the histogram cannot identify the model");

    DriveConfig base = cfg_known;
    base.delta = 0.0;
    base.omega = 1.0 / base.tau;
    (void)survival_model(base, 1.0, 1.0);  // surfaces bad rates before optimizing

    // Warm start: invert the damped-cosine relation at the geometric estimates.
    const double p0_warm = geometric_stay_estimate(hist.counts_on);
    const double p1_warm = geometric_stay_estimate(hist.counts_off);
    const double a = 0.5 * base.transverse_rate() * base.tau;
    const double b = 0.5 * base.big_gamma * base.tau;
    const double envelope = std::exp(-(a + b));
    const double cos_guess = std::clamp((p0_warm + p1_warm - 1.0) / envelope, -1.0, 1.0);
    const double damped_angle = std::acos(cos_guess);
    double theta0 = std::sqrt(damped_angle * damped_angle + (a - b) * (a - b));
    {
        const double lo = options.theta_min + 0.05;
        const double hi = options.theta_max - 0.05;
        theta0 = lo < hi ? std::clamp(theta0, lo, hi)
                         : 0.5 * (options.theta_min + options.theta_max);
    }

    // The bin layout is frozen at the warm start so the objective stays
    // smooth while the optimizer moves.
    const auto warm = expected_run_counts(p0_warm, p1_warm, hist.trajectory_length);
    std::vector<double> ref_on = warm.on, ref_off = warm.off;
    for (double& v : ref_on) v *= static_cast<double>(hist.n_trajectories);
    for (double& v : ref_off) v *= static_cast<double>(hist.n_trajectories);

    detail::RunCountLikelihood nll;
    nll.hist = &hist;
    nll.base = base;
    nll.on = detail::bin_symbol(ref_on, hist.counts_on, options.min_expected_per_bin);
    nll.off = detail::bin_symbol(ref_off, hist.counts_off, options.min_expected_per_bin);
    nll.theta_lo = options.theta_min;
    nll.theta_hi = options.theta_max;
    nll.fidelity_cap = 1.0;

    const long free_params = 1 + (options.fit_f0 ? 1 : 0) + (options.fit_f1 ? 1 : 0);
    long freedom = 0;
    for (const detail::SymbolBins* sb : {&nll.on, &nll.off})
        if (sb->observed_total > 0.0 && sb->ranges.size() >= 2)
            freedom += static_cast<long>(sb->ranges.size()) - 1;
    if (freedom < free_params)
        throw fit_error("fit_survival: too few populated run-length bins to identify the model");

    auto unpack = [&options](const std::vector<double>& x) {
        double f0 = options.f0_fixed, f1 = options.f1_fixed;
        std::size_t i = 1;
        if (options.fit_f0) f0 = x[i++];
        if (options.fit_f1) f1 = x[i++];
        return std::tuple<double, double, double>{x[0], f0, f1};
    };
    auto objective = [&](const std::vector<double>& x) {
        const auto [theta, f0, f1] = unpack(x);
        return nll(theta, f0, f1);
    };

    std::vector<double> start{theta0};
    std::vector<double> step{theta0 > 0.5 * (options.theta_min + options.theta_max) ? -0.1 : 0.1};
    if (options.fit_f0) {
        start.push_back(1.0);
        step.push_back(-0.05);
    }
    if (options.fit_f1) {
        start.push_back(1.0);
        step.push_back(-0.05);
    }

    const MinimizeResult opt = nelder_mead(objective, start, step, options.max_iterations);
    if (!opt.converged) {
        std::ostringstream msg;
        msg << "fit_survival: no convergence after " << opt.iterations
            << " iterations; objective " << opt.fx << " at theta " << opt.x[0];
        throw fit_error(msg.str());
    }

    // Curvature -> covariance. The stencil may poke just past the physical
    // fidelity bound, so the barrier is relaxed for these evaluations only.
    nll.theta_lo = options.theta_min - 1e-2;
    nll.theta_hi = options.theta_max + 1e-2;
    nll.fidelity_cap = 1.0 + 1e-2;
    const double h = 2e-4;
    const std::size_t k = opt.x.size();
    auto eval_at = [&](std::vector<double> x) { return objective(x); };
    const double f_center = eval_at(opt.x);
    std::vector<std::vector<double>> hess(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<double> xp = opt.x, xm = opt.x;
        xp[i] += h;
        xm[i] -= h;
        hess[i][i] = (eval_at(xp) - 2.0 * f_center + eval_at(xm)) / (h * h);
        for (std::size_t j = i + 1; j < k; ++j) {
            std::vector<double> xpp = opt.x, xpm = opt.x, xmp = opt.x, xmm = opt.x;
            xpp[i] += h; xpp[j] += h;
            xpm[i] += h; xpm[j] -= h;
            xmp[i] -= h; xmp[j] += h;
            xmm[i] -= h; xmm[j] -= h;
            hess[i][j] = hess[j][i] =
                (eval_at(xpp) - eval_at(xpm) - eval_at(xmp) + eval_at(xmm)) / (4.0 * h * h);
        }
    }
    const auto cov = detail::invert_small(hess);
    if (cov.empty())
        throw fit_error("fit_survival: singular curvature at the optimum; no covariance available");
    for (std::size_t i = 0; i < k; ++i) {
        if (!(cov[i][i] > 0.0) || !std::isfinite(cov[i][i]))
            throw fit_error("fit_survival: curvature at the optimum is not positive definite");
    }

    FitResult out;
    const auto [theta_hat, f0_hat, f1_hat] = unpack(opt.x);
    out.theta_hat = theta_hat;
    out.f0_hat = std::min(f0_hat, 1.0);
    out.f1_hat = std::min(f1_hat, 1.0);
    DriveConfig fitted = base;
    fitted.omega = theta_hat / fitted.tau;
    const SurvivalModel mhat = survival_model(fitted, out.f0_hat, out.f1_hat);
    out.p0_hat = mhat.p0;
    out.p1_hat = mhat.p1;
    out.objective = opt.fx;
    out.iterations = opt.iterations;
    out.converged = true;

    std::vector<std::size_t> slot{0};
    if (options.fit_f0) slot.push_back(1);
    if (options.fit_f1) slot.push_back(2);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            out.covariance[slot[i]][slot[j]] = cov[i][j];
    return out;
}

struct ResidualPoint {
    Outcome symbol = Outcome::On;
    long q = 0;
    double observed_ratio = 0.0;
    double expected_ratio = 0.0;
    double log_residual = 0.0;
};

// Diagnostic companion to the likelihood fit: residuals of the observed
// survival ratios against the model's expected ratios, on a log scale.
// Run lengths observed fewer than min_count times are skipped because their
// ratios are noise.
inline std::vector<ResidualPoint> log_vobs_residuals(const RunHistogram& hist, double p0,
                                                     double p1, long min_count = 5) {
    const auto expect = expected_run_counts(p0, p1, hist.trajectory_length);
    std::vector<ResidualPoint> out;
    for (Outcome symbol : {Outcome::On, Outcome::Off}) {
        const auto& counts = symbol == Outcome::On ? hist.counts_on : hist.counts_off;
        const auto first = counts.find(1);
        const long u1 = first != counts.end() ? first->second : 0;
        const double e1 = expect.at(symbol, 1);
        if (u1 < min_count || !(e1 > 0.0)) continue;
        for (const auto& [q, u] : counts) {
            if (q == 1 || u < min_count) continue;
            const double eq = expect.at(symbol, q);
            if (!(eq > 0.0)) continue;
            ResidualPoint pt;
            pt.symbol = symbol;
            pt.q = q;
            pt.observed_ratio = static_cast<double>(u) / static_cast<double>(u1);
            pt.expected_ratio = eq / e1;
            pt.log_residual = std::log(pt.observed_ratio) - std::log(pt.expected_ratio);
            out.push_back(pt);
        }
    }
    return out;
}

} // namespace zeno
