#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace zeno {

// Two-level state in the rotating frame: (u, v) are the in-phase and
// quadrature coherences, w the inversion. w = -1 is state 0 (ground, bright
// under the probe), w = +1 is state 1 (dark).
struct BlochState {
    double u = 0.0;
    double v = 0.0;
    double w = -1.0;
};

inline BlochState ground_state() noexcept { return {0.0, 0.0, -1.0}; }
inline BlochState excited_state() noexcept { return {0.0, 0.0, +1.0}; }

inline double excited_population(const BlochState& s) noexcept { return 0.5 * (1.0 + s.w); }
inline double bloch_norm(const BlochState& s) noexcept {
    return std::sqrt(s.u * s.u + s.v * s.v + s.w * s.w);
}

// Drive-pulse physics. Frequencies and rates in rad/s and 1/s, times in
// seconds. gamma_ph is the phase-diffusion rate of the drive light,
// big_gamma the decay rate of the inversion.
struct DriveConfig {
    double omega = 0.0;
    double delta = 0.0;
    double tau = 1.0;
    double gamma_ph = 0.0;
    double big_gamma = 0.0;

    // Transverse relaxation of the coherences.
    double transverse_rate() const noexcept { return gamma_ph + 0.5 * big_gamma; }

    bool lossless() const noexcept { return gamma_ph == 0.0 && big_gamma == 0.0; }

    void validate() const {
        auto check = [](double x, bool nonneg, const char* name) {
            if (!std::isfinite(x))
                throw std::invalid_argument(std::string("DriveConfig.") + name + " is not finite");
            if (nonneg && x < 0.0)
                throw std::invalid_argument(std::string("DriveConfig.") + name + " must be non-negative");
        };
        check(omega, true, "omega");
        check(delta, false, "delta");
        check(tau, true, "tau");
        check(gamma_ph, true, "gamma_ph");
        check(big_gamma, true, "big_gamma");
        if (tau <= 0.0) throw std::invalid_argument("DriveConfig.tau must be strictly positive");
    }

    friend bool operator==(const DriveConfig&, const DriveConfig&) = default;
};

// theta_eff = sqrt(Omega^2 + Delta^2) * tau, the nutation angle of one pulse.
inline double effective_theta(const DriveConfig& cfg) {
    cfg.validate();
    return std::hypot(cfg.omega, cfg.delta) * cfg.tau;
}

namespace detail {

struct BlochDerivative {
    double omega, delta, gamma, big_gamma;
    void operator()(const BlochState& s, BlochState& d) const noexcept {
        d.u = delta * s.v - gamma * s.u;
        d.v = -delta * s.u + omega * s.w - gamma * s.v;
        d.w = -omega * s.v - big_gamma * (s.w + 1.0);
    }
};

} // namespace detail

// Evolves the state under
//   du/dt =  Delta v - gamma u
//   dv/dt = -Delta u + Omega w - gamma v
//   dw/dt = -Omega v - Gamma (w + 1),    gamma = gamma_ph + Gamma/2
// with a classical fixed-step fourth-order integrator. The step count is
// chosen so the accumulated error stays below 1e-9 per unit nutation angle
// (and below tau/1000 per step); pure function of its inputs.
inline BlochState bloch_propagate(const BlochState& state, const DriveConfig& cfg, double duration) {
    cfg.validate();
    if (!std::isfinite(state.u) || !std::isfinite(state.v) || !std::isfinite(state.w))
        throw std::invalid_argument("BlochState has non-finite fields");
    if (!std::isfinite(duration) || duration < 0.0)
        throw std::invalid_argument("duration must be finite and non-negative");
    if (duration == 0.0) return state;

    const double gamma = cfg.transverse_rate();
    const double rate = std::hypot(cfg.omega, cfg.delta) + gamma + cfg.big_gamma;
    const double angle = duration * rate;
    auto steps = static_cast<std::int64_t>(std::ceil(angle * 320.0));
    steps = std::max<std::int64_t>(steps, static_cast<std::int64_t>(std::ceil(1000.0 * duration / cfg.tau)));
    steps = std::max<std::int64_t>(steps, 64);

    const double h = duration / static_cast<double>(steps);
    const detail::BlochDerivative f{cfg.omega, cfg.delta, gamma, cfg.big_gamma};

    BlochState s = state;
    BlochState k1, k2, k3, k4, tmp;
    for (std::int64_t i = 0; i < steps; ++i) {
        f(s, k1);
        tmp = {s.u + 0.5 * h * k1.u, s.v + 0.5 * h * k1.v, s.w + 0.5 * h * k1.w};
        f(tmp, k2);
        tmp = {s.u + 0.5 * h * k2.u, s.v + 0.5 * h * k2.v, s.w + 0.5 * h * k2.w};
        f(tmp, k3);
        tmp = {s.u + h * k3.u, s.v + h * k3.v, s.w + h * k3.w};
        f(tmp, k4);
        s.u += h * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u) / 6.0;
        s.v += h * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v) / 6.0;
        s.w += h * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w) / 6.0;
    }
    return s;
}

// Probability that one drive pulse starting from state 0 ends in state 1.
// Closed form in the lossless case; otherwise delegates to the integrator.
inline double excitation_probability(const DriveConfig& cfg) {
    cfg.validate();
    if (cfg.lossless()) {
        if (cfg.omega == 0.0) return 0.0;
        const double w2 = cfg.omega * cfg.omega + cfg.delta * cfg.delta;
        const double s = std::sin(0.5 * effective_theta(cfg));
        return (cfg.omega * cfg.omega / w2) * s * s;
    }
    return excited_population(bloch_propagate(ground_state(), cfg, cfg.tau));
}

} // namespace zeno
