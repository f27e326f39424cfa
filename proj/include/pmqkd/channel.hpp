#pragma once

#include <string>

namespace pmqkd {

// How the total Alice-Bob distance maps onto the two arms meeting at the
// untrusted midpoint.
//   PaperLiteral: eta_a = eta_b = end-to-end transmittance / 2.
//   SymmetricMid: each arm spans L/2 of fiber, eta_a = eta_b = eta_d 10^(-alpha (L/2) / 10).
enum class Convention { PaperLiteral, SymmetricMid };

const char* to_token(Convention c);                   // "paper-literal" / "symmetric-mid"
Convention convention_from_token(const std::string&);  // throws ConfigError

// Detector and source parameters shared by every model in the library.
struct SystemParams {
    double dark_count_rate = 8e-8;                // p_d, per pulse per detector
    double misalignment = 0.015;                  // e_d
    double detector_efficiency = 0.145;           // eta_d
    double error_correction_inefficiency = 1.15;  // f
    double intrinsic_error = 0.5;                 // e_0, error rate of background events
    double attenuation_db_per_km = 0.2;           // alpha
    double intensity = 0.1;                       // mu, mean photons per round (mu_a = mu_b = mu/2)
};

// Range-checks every field; throws ConfigError naming the offender.
void validate(const SystemParams& p);

struct ChannelConfig {
    double length_km = 0.0;
    Convention convention = Convention::PaperLiteral;
};

// eta_d 10^(-alpha L / 10), the full-path transmittance including the detector.
double end_to_end_transmittance(const SystemParams& p, double length_km);

struct ArmTransmittances {
    double eta_a;
    double eta_b;
};

ArmTransmittances arm_transmittances(const SystemParams& p, const ChannelConfig& c);

}  // namespace pmqkd
