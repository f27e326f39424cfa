#pragma once

#include <string>

#include "pmqkd/channel.hpp"

namespace pmqkd {

// Dark-count factor used in the single-photon error-rate formula. The printed
// closed form carries (1 - p_d^2); the literature analogue uses (1 - p_d)^2.
// Both are exposed so the difference can be quantified; reports always stamp
// the active choice.
enum class E11DarkFactor { OneMinusPd2, SquaredOneMinusPd };

const char* to_token(E11DarkFactor v);                     // "1-pd2" / "(1-pd)2"
E11DarkFactor e11_dark_factor_from_token(const std::string&);  // throws ConfigError

// Yield of the joint single-photon component for arm transmittances
// (eta_a, eta_b):
//   Y_11 = (1-p_d)^2 [ eta_a eta_b / 2
//                      + (2 eta_a + 2 eta_b - 3 eta_a eta_b) p_d
//                      + 4 (1-eta_a)(1-eta_b) p_d^2 ].
double yield_11(const SystemParams& p, double eta_a, double eta_b);

// Single-photon error rate, from
//   e_11 Y_11 = e_0 Y_11 - (e_0 - e_d) D eta_a eta_b / 2
// with D the selected dark-count factor. Returns max(0, .)/Y_11. Throws
// DegenerateChannelError when Y_11 = 0.
double error_rate_11(const SystemParams& p, double eta_a, double eta_b,
                     E11DarkFactor v = E11DarkFactor::OneMinusPd2);

// Total gain and error rate of the interference measurement at intensity
// p.intensity (split evenly over the arms):
//   mu'   = eta_a mu_a + eta_b mu_b
//   x     = sqrt(eta_a mu_a eta_b mu_b) / 2
//   Q_D0  = 2 (1-p_d)^2 e^{-mu'/2} [1-(1-p_d)e^{-eta_a mu_a/2}] [1-(1-p_d)e^{-eta_b mu_b/2}]
//   Q_D1  = 2 p_d (1-p_d)^2 e^{-mu'/2} [I_0(2x) - (1-p_d)e^{-mu'/2}]
//   E Q   = e_d Q_D0 + (1-e_d) Q_D1.
struct PolarizationGains {
    double Q_D0;
    double Q_D1;
    double Q_total;
    double E_total;
    double mu_prime;
    double x;
};

// Throws DegenerateChannelError when Q_total = 0.
PolarizationGains gains_and_qber(const SystemParams& p, double eta_a, double eta_b);

struct PolarizationKeyRateResult {
    double Y_11;
    double e_11;
    double Q_11;
    double Q_D0;
    double Q_D1;
    double Q_total;
    double E_total;
    double mu_prime;
    double x;
    double R;
    double R_clamped;
};

// Key rate with sifting factor 1/2,
//   R = 1/2 { Q_11 [1 - H(e_11)] - Q_total f H(E_total) },
// Q_11 = mu_a mu_b e^{-mu_a-mu_b} Y_11. Error rates are clamped to [0, 1/2]
// before entropy. R_clamped = max(R, 0).
PolarizationKeyRateResult keyrate_polarization(
    const SystemParams& p, const ChannelConfig& c,
    E11DarkFactor v = E11DarkFactor::OneMinusPd2);

}  // namespace pmqkd
