#include "pmqkd/bloch.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pmqkd {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_phase(double phi) {
    double r = std::fmod(phi, kTwoPi);
    if (r < 0.0) {
        r += kTwoPi;
    }
    return r;
}

}  // namespace

PolarizationState bloch_state(double theta, double phi) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
        throw std::domain_error("bloch_state: theta must lie in [0, pi]");
    }
    if (!std::isfinite(phi)) {
        throw std::domain_error("bloch_state: phi must be finite");
    }
    const double half = theta / 2.0;
    return PolarizationState{
        ComplexAmplitude{std::cos(half), 0.0},
        std::polar(std::sin(half), wrap_phase(phi)),
    };
}

Basis basis_from_phase(double theta, double phi) {
    const double phi0 = wrap_phase(phi);
    Basis b;
    b.theta = theta;
    b.phi = phi0;
    b.state0 = bloch_state(theta, phi0);
    b.state1 = bloch_state(theta, wrap_phase(phi0 + std::numbers::pi));
    return b;
}

ComplexAmplitude inner_product(const PolarizationState& a, const PolarizationState& b) {
    return std::conj(a.amp0) * b.amp0 + std::conj(a.amp1) * b.amp1;
}

double norm_squared(const PolarizationState& s) {
    return std::norm(s.amp0) + std::norm(s.amp1);
}

}  // namespace pmqkd
