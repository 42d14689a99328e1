// A driven, relaxing atom under repeated probing produces a random telegraph
// record. This demo renders a stretch of one trajectory, compares the pooled
// run-length ratios with the pulse model, and recovers the generating
// parameters by fit.

#include <cmath>
#include <cstdio>
#include <string>

#include "zeno/fit.hpp"
#include "zeno/runs.hpp"
#include "zeno/survival.hpp"
#include "zeno/trajectory.hpp"

int main() {
    zeno::DriveConfig cfg;
    cfg.omega = 2.0;
    cfg.tau = 1.0;
    cfg.gamma_ph = 0.1;
    cfg.big_gamma = 0.05;
    const double dark_fidelity = 0.9;

    // Markov mode folds the detection fidelities into the chain itself, which
    // is the process the run-length model and the fit describe. Full-quantum
    // mode treats an imperfect detector as per-probe misassignment instead,
    // so its records are only chain-distributed for perfect detection.
    const auto batch = zeno::generate_batch(cfg, 1.0, dark_fidelity, 500, 200, 2718,
                                            zeno::TrajectoryMode::Markov);

    std::printf("first 320 of 500 measurements of one trajectory ('#' bright, '.' dark):\n\n");
    const auto& outcomes = batch.front().outcomes;
    for (int row = 0; row < 4; ++row) {
        std::string line;
        for (int i = 0; i < 80; ++i)
            line += outcomes[static_cast<std::size_t>(row * 80 + i)] == zeno::Outcome::On ? '#' : '.';
        std::printf("  %s\n", line.c_str());
    }

    const zeno::RunHistogram hist = zeno::run_lengths(batch);
    const zeno::SurvivalModel model = zeno::survival_model(cfg, 1.0, dark_fidelity);
    const auto expected = zeno::expected_run_counts(model.p0, model.p1, hist.trajectory_length);

    std::printf("\nrun-length ratios pooled over %ld trajectories, next to the model:\n\n",
                hist.n_trajectories);
    std::printf("%4s %13s %13s %13s %13s\n", "q", "bright obs", "bright model", "dark obs",
                "dark model");
    for (long q = 1; q <= 8; ++q) {
        const double model_on =
            expected.at(zeno::Outcome::On, q) / expected.at(zeno::Outcome::On, 1);
        const double model_off =
            expected.at(zeno::Outcome::Off, q) / expected.at(zeno::Outcome::Off, 1);
        std::printf("%4ld %13.5f %13.5f %13.5f %13.5f\n", q,
                    zeno::v_obs(hist, zeno::Outcome::On, q), model_on,
                    zeno::v_obs(hist, zeno::Outcome::Off, q), model_off);
    }

    const zeno::FitResult fit = zeno::fit_survival(hist, cfg);
    std::printf("\nfit against the pooled histogram:\n");
    std::printf("  pulse area                %.4f +- %.4f rad   (generated with %.1f)\n",
                fit.theta_hat, fit.theta_sigma(), cfg.omega * cfg.tau);
    std::printf("  dark detection fidelity   %.4f +- %.4f       (generated with %.1f)\n",
                fit.f1_hat, std::sqrt(fit.covariance[2][2]), dark_fidelity);
    return 0;
}
