#include "pmqkd/keyrate_bb84.hpp"

#include <algorithm>
#include <cmath>

#include "pmqkd/errors.hpp"
#include "pmqkd/math.hpp"

namespace pmqkd {

PhotonNumberStats photon_number_stats(const SystemParams& p, double eta) {
    PhotonNumberStats s;
    s.Y_0 = 2.0 * p.dark_count_rate;
    // expanded form of 1 - (1 - Y_0)(1 - eta); the literal one cancels
    // catastrophically when Y_0 and eta are both small
    s.Y_1 = s.Y_0 + (1.0 - s.Y_0) * eta;
    if (s.Y_1 <= 0.0) {
        throw DegenerateChannelError("single-photon yield is zero");
    }
    s.e_1 = p.misalignment + (p.intrinsic_error - p.misalignment) * s.Y_0 / s.Y_1;
    return s;
}

BB84Gain gain_qber_bb84(const SystemParams& p, double eta) {
    const double y0 = 2.0 * p.dark_count_rate;
    BB84Gain g;
    // stable form of 1 - (1 - Y_0) e^{-eta mu}
    g.Q_mu = -std::expm1(-eta * p.intensity) + y0 * std::exp(-eta * p.intensity);
    if (g.Q_mu <= 0.0) {
        throw DegenerateChannelError("pulse gain is zero");
    }
    g.E_mu = p.misalignment + (p.intrinsic_error - p.misalignment) * y0 / g.Q_mu;
    return g;
}

namespace {

double entropy_clamped(double e) {
    return binary_entropy(std::clamp(e, 0.0, 0.5));
}

}  // namespace

BB84KeyRateResult keyrate_bb84(const SystemParams& p, double length_km) {
    validate(p);
    const double eta = end_to_end_transmittance(p, length_km);

    const PhotonNumberStats s = photon_number_stats(p, eta);
    const BB84Gain g = gain_qber_bb84(p, eta);

    BB84KeyRateResult r;
    r.Y_0 = s.Y_0;
    r.Y_1 = s.Y_1;
    r.e_1 = s.e_1;
    r.Q_mu = g.Q_mu;
    r.E_mu = g.E_mu;
    r.q_1 = p.intensity * std::exp(-p.intensity) * s.Y_1 / g.Q_mu;
    r.R = 0.5 * g.Q_mu *
          (-p.error_correction_inefficiency * entropy_clamped(g.E_mu) +
           r.q_1 * (1.0 - entropy_clamped(s.e_1)));
    r.R_clamped = std::max(r.R, 0.0);
    return r;
}

}  // namespace pmqkd
