#include "pmqkd/keyrate_polarization.hpp"

#include <algorithm>
#include <cmath>

#include "pmqkd/errors.hpp"
#include "pmqkd/math.hpp"

namespace pmqkd {

const char* to_token(E11DarkFactor v) {
    return v == E11DarkFactor::OneMinusPd2 ? "1-pd2" : "(1-pd)2";
}

E11DarkFactor e11_dark_factor_from_token(const std::string& s) {
    if (s == "1-pd2") {
        return E11DarkFactor::OneMinusPd2;
    }
    if (s == "(1-pd)2") {
        return E11DarkFactor::SquaredOneMinusPd;
    }
    throw ConfigError("unknown e11 dark factor '" + s + "' (expected 1-pd2 or (1-pd)2)");
}

double yield_11(const SystemParams& p, double eta_a, double eta_b) {
    const double pd = p.dark_count_rate;
    const double one = (1.0 - pd) * (1.0 - pd);
    return one * (eta_a * eta_b / 2.0 +
                  (2.0 * eta_a + 2.0 * eta_b - 3.0 * eta_a * eta_b) * pd +
                  4.0 * (1.0 - eta_a) * (1.0 - eta_b) * pd * pd);
}

double error_rate_11(const SystemParams& p, double eta_a, double eta_b, E11DarkFactor v) {
    const double pd = p.dark_count_rate;
    const double y11 = yield_11(p, eta_a, eta_b);
    if (y11 <= 0.0) {
        throw DegenerateChannelError("single-photon yield is zero");
    }
    const double dark = v == E11DarkFactor::OneMinusPd2 ? 1.0 - pd * pd
                                                        : (1.0 - pd) * (1.0 - pd);
    const double num = p.intrinsic_error * y11 -
                       (p.intrinsic_error - p.misalignment) * dark * eta_a * eta_b / 2.0;
    return std::max(0.0, num) / y11;
}

PolarizationGains gains_and_qber(const SystemParams& p, double eta_a, double eta_b) {
    const double pd = p.dark_count_rate;
    const double mu_a = p.intensity / 2.0;
    const double mu_b = p.intensity / 2.0;
    const double sa = eta_a * mu_a;
    const double sb = eta_b * mu_b;

    PolarizationGains g;
    g.mu_prime = sa + sb;
    g.x = std::sqrt(sa * sb) / 2.0;

    const double half_decay = std::exp(-g.mu_prime / 2.0);
    const double no_dark = 1.0 - pd;
    // stable forms: 1 - (1-p_d) e^{-s/2} and I_0(2x) - (1-p_d) e^{-mu'/2}
    // both cancel catastrophically when written literally at small s
    const double click_a = -std::expm1(-sa / 2.0) + pd * std::exp(-sa / 2.0);
    const double click_b = -std::expm1(-sb / 2.0) + pd * std::exp(-sb / 2.0);
    g.Q_D0 = 2.0 * no_dark * no_dark * half_decay * click_a * click_b;
    g.Q_D1 = 2.0 * pd * no_dark * no_dark * half_decay *
             (bessel_i0_minus_one(2.0 * g.x) - std::expm1(-g.mu_prime / 2.0) +
              pd * half_decay);
    g.Q_total = g.Q_D0 + g.Q_D1;
    if (g.Q_total <= 0.0) {
        throw DegenerateChannelError("interference gain is zero");
    }
    g.E_total = (p.misalignment * g.Q_D0 + (1.0 - p.misalignment) * g.Q_D1) / g.Q_total;
    return g;
}

namespace {

double entropy_clamped(double e) {
    return binary_entropy(std::clamp(e, 0.0, 0.5));
}

}  // namespace

PolarizationKeyRateResult keyrate_polarization(const SystemParams& p,
                                               const ChannelConfig& c,
                                               E11DarkFactor v) {
    validate(p);
    const ArmTransmittances arms = arm_transmittances(p, c);

    PolarizationKeyRateResult r;
    r.Y_11 = yield_11(p, arms.eta_a, arms.eta_b);
    r.e_11 = error_rate_11(p, arms.eta_a, arms.eta_b, v);

    const double mu_a = p.intensity / 2.0;
    const double mu_b = p.intensity / 2.0;
    r.Q_11 = mu_a * mu_b * std::exp(-mu_a - mu_b) * r.Y_11;

    const PolarizationGains g = gains_and_qber(p, arms.eta_a, arms.eta_b);
    r.Q_D0 = g.Q_D0;
    r.Q_D1 = g.Q_D1;
    r.Q_total = g.Q_total;
    r.E_total = g.E_total;
    r.mu_prime = g.mu_prime;
    r.x = g.x;

    r.R = 0.5 * (r.Q_11 * (1.0 - entropy_clamped(r.e_11)) -
                 r.Q_total * p.error_correction_inefficiency * entropy_clamped(r.E_total));
    r.R_clamped = std::max(r.R, 0.0);
    return r;
}

}  // namespace pmqkd
