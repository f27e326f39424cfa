#pragma once

#include "pmqkd/channel.hpp"

namespace pmqkd {

// k-photon yields and error rates of the decoy-capable direct link,
//   Y_0 = 2 p_d,
//   Y_k = 1 - (1 - Y_0)(1 - eta)^k,
//   e_k = e_d + (e_0 - e_d) Y_0 / Y_k.
struct PhotonNumberStats {
    double Y_0;
    double Y_1;
    double e_1;
};

PhotonNumberStats photon_number_stats(const SystemParams& p, double eta);

// Gain and error rate of the full Poissonian pulse,
//   Q_mu = 1 - (1 - Y_0) e^{-eta mu},
//   E_mu = e_d + (e_0 - e_d) Y_0 / Q_mu.
struct BB84Gain {
    double Q_mu;
    double E_mu;
};

// Throws DegenerateChannelError when Q_mu = 0.
BB84Gain gain_qber_bb84(const SystemParams& p, double eta);

struct BB84KeyRateResult {
    double Y_0;
    double Y_1;
    double e_1;
    double Q_mu;
    double E_mu;
    double q_1;  // single-photon fraction mu e^{-mu} Y_1 / Q_mu
    double R;
    double R_clamped;
};

// Single-intensity asymptotic rate with sifting factor 1/2,
//   R = 1/2 Q_mu { -f H(E_mu) + q_1 [1 - H(e_1)] },
// over the direct channel eta = eta_d 10^(-alpha L / 10). Error rates are
// clamped to [0, 1/2] before entropy. R_clamped = max(R, 0).
BB84KeyRateResult keyrate_bb84(const SystemParams& p, double length_km);

}  // namespace pmqkd
