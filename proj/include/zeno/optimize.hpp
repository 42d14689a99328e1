#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace zeno {

struct MinimizeResult {
    std::vector<double> x;
    double fx = 0.0;
    long iterations = 0;
    bool converged = false;
};

// Derivative-free downhill simplex minimizer. The likelihood surfaces in this
// library are low-dimensional and smooth but live next to hard barriers, which
// is exactly the regime where a simplex behaves well and gradients do not.
inline MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                                  const std::vector<double>& start,
                                  const std::vector<double>& initial_step,
                                  long max_iterations = 2000,
                                  double x_tolerance = 1e-8,
                                  double f_tolerance = 1e-10) {
    const std::size_t n = start.size();
    if (n == 0) throw std::invalid_argument("nelder_mead: empty start point");
    if (initial_step.size() != n)
        throw std::invalid_argument("nelder_mead: step size count must match dimension");
    if (max_iterations < 1) throw std::invalid_argument("nelder_mead: iteration budget must be positive");

    std::vector<std::vector<double>> pts(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += initial_step[i];
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = objective(pts[i]);

    std::vector<std::size_t> order(n + 1);
    MinimizeResult result;
    result.iterations = 0;

    auto centroid_excluding = [&](std::size_t skip) {
        std::vector<double> c(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == skip) continue;
            for (std::size_t d = 0; d < n; ++d) c[d] += pts[i][d];
        }
        for (double& v : c) v /= static_cast<double>(n);
        return c;
    };

    bool converged = false;
    while (result.iterations < max_iterations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order[0];
        const std::size_t worst = order[n];
        const std::size_t second_worst = order[n - 1];

        double spread_x = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t d = 0; d < n; ++d)
                spread_x = std::max(spread_x, std::abs(pts[i][d] - pts[best][d]));
        // Function values are compared on a relative scale so that likelihoods
        // growing with the sample size do not push the threshold below the
        // floating-point noise floor of the objective itself.
        const double spread_f = 2.0 * std::abs(fv[worst] - fv[best]) /
                                (std::abs(fv[worst]) + std::abs(fv[best]) + 1e-300);
        if (spread_x < x_tolerance || spread_f < f_tolerance) {
            converged = true;
            break;
        }
        ++result.iterations;

        const std::vector<double> c = centroid_excluding(worst);
        auto along = [&](double coeff) {
            std::vector<double> p(n);
            for (std::size_t d = 0; d < n; ++d)
                p[d] = c[d] + coeff * (c[d] - pts[worst][d]);
            return p;
        };

        std::vector<double> reflected = along(1.0);
        const double fr = objective(reflected);
        if (fr < fv[best]) {
            std::vector<double> expanded = along(2.0);
            const double fe = objective(expanded);
            if (fe < fr) {
                pts[worst] = std::move(expanded);
                fv[worst] = fe;
            } else {
                pts[worst] = std::move(reflected);
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second_worst]) {
            pts[worst] = std::move(reflected);
            fv[worst] = fr;
            continue;
        }
        const bool outside = fr < fv[worst];
        std::vector<double> contracted = along(outside ? 0.5 : -0.5);
        const double fc = objective(contracted);
        if (fc < std::min(fr, fv[worst])) {
            pts[worst] = std::move(contracted);
            fv[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t d = 0; d < n; ++d)
                pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
            fv[i] = objective(pts[i]);
        }
    }

    const std::size_t final_best = static_cast<std::size_t>(
        std::min_element(fv.begin(), fv.end()) - fv.begin());
    result.x = pts[final_best];
    result.fx = fv[final_best];
    result.converged = converged;
    return result;
}

} // namespace zeno
