#include "pmqkd/channel.hpp"

#include <cmath>

#include "pmqkd/errors.hpp"

namespace pmqkd {

const char* to_token(Convention c) {
    return c == Convention::PaperLiteral ? "paper-literal" : "symmetric-mid";
}

Convention convention_from_token(const std::string& s) {
    if (s == "paper-literal") {
        return Convention::PaperLiteral;
    }
    if (s == "symmetric-mid") {
        return Convention::SymmetricMid;
    }
    throw ConfigError("unknown channel convention '" + s +
                      "' (expected paper-literal or symmetric-mid)");
}

namespace {

void require(bool ok, const char* what) {
    if (!ok) {
        throw ConfigError(std::string("invalid parameter: ") + what);
    }
}

}  // namespace

void validate(const SystemParams& p) {
    require(p.dark_count_rate >= 0.0 && p.dark_count_rate <= 1.0,
            "dark_count_rate must lie in [0, 1]");
    require(p.misalignment >= 0.0 && p.misalignment <= 1.0,
            "misalignment must lie in [0, 1]");
    require(p.detector_efficiency >= 0.0 && p.detector_efficiency <= 1.0,
            "detector_efficiency must lie in [0, 1]");
    require(p.error_correction_inefficiency >= 1.0 &&
                std::isfinite(p.error_correction_inefficiency),
            "error_correction_inefficiency must be >= 1");
    require(p.intrinsic_error >= 0.0 && p.intrinsic_error <= 1.0,
            "intrinsic_error must lie in [0, 1]");
    require(p.attenuation_db_per_km >= 0.0 && std::isfinite(p.attenuation_db_per_km),
            "attenuation_db_per_km must be >= 0");
    require(p.intensity > 0.0 && std::isfinite(p.intensity),
            "intensity must be > 0");
}

double end_to_end_transmittance(const SystemParams& p, double length_km) {
    if (!(length_km >= 0.0) || !std::isfinite(length_km)) {
        throw ConfigError("length_km must be finite and >= 0");
    }
    return p.detector_efficiency *
           std::pow(10.0, -p.attenuation_db_per_km * length_km / 10.0);
}

ArmTransmittances arm_transmittances(const SystemParams& p, const ChannelConfig& c) {
    if (c.convention == Convention::SymmetricMid) {
        const double eta = end_to_end_transmittance(p, c.length_km / 2.0);
        return {eta, eta};
    }
    const double eta = end_to_end_transmittance(p, c.length_km) / 2.0;
    return {eta, eta};
}

}  // namespace pmqkd
