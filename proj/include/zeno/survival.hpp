#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zeno/bloch.hpp"

namespace zeno {

// Survival probability of the initial eigenstate after q pulses with no
// intervening measurement: cos^2(q theta / 2).
inline double survival_coherent(long q, double theta) {
    if (q < 0) throw std::invalid_argument("survival_coherent: q must be non-negative");
    const double c = std::cos(0.5 * static_cast<double>(q) * theta);
    return c * c;
}

// Survival after q measured pulses of an ideal (lossless, perfectly read out)
// cycle: p^q with p = cos^2(theta/2).
inline double survival_measured_ideal(long q, double theta) {
    if (q < 0) throw std::invalid_argument("survival_measured_ideal: q must be non-negative");
    const double c = std::cos(0.5 * theta);
    return std::pow(c * c, static_cast<double>(q));
}

// Per-measurement stay probabilities of the relaxing cycle, together with the
// ingredients they are built from. p0 applies when the last result was "on"
// (state 0), p1 when it was "off" (state 1); the readout factors f0, f1 fold
// symbol misassignment into the probabilities.
struct SurvivalModel {
    double p0 = 1.0;
    double p1 = 1.0;
    double b0 = 0.0;          // saturation weight of state 1
    double b1 = 1.0;
    double a = 0.0;           // transverse damping exponent, gamma*tau/2
    double b = 0.0;           // longitudinal damping exponent, Gamma*tau/2
    double theta_damped = 0.0;
    double f0 = 1.0;
    double f1 = 1.0;
    bool overdamped = false;  // theta_damped holds the magnitude of the imaginary angle
    bool clamped = false;     // a probability had to be clamped into [0, 1]
};

// Builds the per-pulse stay probabilities of a resonantly driven, relaxing
// cycle. These are the exact single-pulse solutions of the damped Rabi
// problem expressed through B0, B1, a, b and the damped angle, so they agree
// with bloch_propagate plus projection to machine precision; when a = b = 0
// they reduce to the familiar 1 - f_i B_i (1 - cos theta) form.
inline SurvivalModel survival_model(const DriveConfig& cfg, double f0, double f1) {
    cfg.validate();
    if (!(f0 > 0.0 && f0 <= 1.0) || !(f1 > 0.0 && f1 <= 1.0))
        throw std::invalid_argument("survival_model: fidelities must lie in (0, 1]");

    SurvivalModel m;
    m.f0 = f0;
    m.f1 = f1;

    const double gamma = cfg.transverse_rate();
    const double theta = cfg.omega * cfg.tau;
    m.a = 0.5 * gamma * cfg.tau;
    m.b = 0.5 * cfg.big_gamma * cfg.tau;

    if (cfg.omega > 0.0) {
        m.b0 = (0.5 * cfg.omega * cfg.omega) / (cfg.omega * cfg.omega + cfg.big_gamma * gamma);
    } else {
        m.b0 = 0.0;   // no drive, nothing saturates
    }
    m.b1 = 1.0 - m.b0;

    if (cfg.lossless()) {
        // Short-circuit so the lossless limit is bit-identical to the ideal
        // cycle: p = cos^2(theta/2), untouched by the 1 - f*(1 - p) detour
        // when f = 1.
        m.theta_damped = theta;
        const double c = std::cos(0.5 * theta);
        const double stay = c * c;
        m.p0 = (f0 == 1.0) ? stay : 1.0 - f0 * (1.0 - stay);
        m.p1 = (f1 == 1.0) ? stay : 1.0 - f1 * (1.0 - stay);
        return m;
    }

    const double ab = m.a + m.b;
    const double d = m.a - m.b;
    const double x2 = theta * theta - d * d;
    double cosT, sincT;
    if (x2 >= 0.0) {
        m.theta_damped = (d == 0.0) ? theta : std::sqrt(x2);
        cosT = std::cos(m.theta_damped);
        sincT = (m.theta_damped > 1e-8) ? std::sin(m.theta_damped) / m.theta_damped
                                        : 1.0 - m.theta_damped * m.theta_damped / 6.0;
    } else {
        m.overdamped = true;
        m.theta_damped = std::sqrt(-x2);
        cosT = std::cosh(m.theta_damped);
        sincT = (m.theta_damped > 1e-8) ? std::sinh(m.theta_damped) / m.theta_damped
                                        : 1.0 + m.theta_damped * m.theta_damped / 6.0;
    }
    const double env = std::exp(-ab);

    // Single-pulse departure probabilities out of each eigenstate.
    const double depart0 = m.b0 * (1.0 - env * (cosT + ab * sincT));
    const double depart1 = m.b1 * (1.0 - env * cosT) - env * sincT * (m.b1 * ab - 2.0 * m.b);

    double p0 = 1.0 - f0 * depart0;
    double p1 = 1.0 - f1 * depart1;
    const double c0 = std::clamp(p0, 0.0, 1.0);
    const double c1 = std::clamp(p1, 0.0, 1.0);
    m.clamped = (c0 != p0) || (c1 != p1);
    m.p0 = c0;
    m.p1 = c1;
    return m;
}

} // namespace zeno
