#pragma once

#include <complex>

namespace pmqkd {

using ComplexAmplitude = std::complex<double>;

// Qubit state in the computational basis, amp0|0> + amp1|1>.
struct PolarizationState {
    ComplexAmplitude amp0;
    ComplexAmplitude amp1;
};

// State on the Bloch sphere: cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
// theta must lie in [0, pi]; phi must be finite (reduced mod 2pi).
// Throws std::domain_error on bad input.
PolarizationState bloch_state(double theta, double phi);

// Measurement basis built from two antipodal-phase Bloch states sharing a
// polar angle: state0 at phase phi, state1 at phase phi + pi.
struct Basis {
    double theta;  // radians, in [0, pi]
    double phi;    // radians, reduced to [0, 2pi)
    PolarizationState state0;
    PolarizationState state1;
};

Basis basis_from_phase(double theta, double phi);

// <a|b> with the physics convention (conjugate-linear in the first slot).
ComplexAmplitude inner_product(const PolarizationState& a, const PolarizationState& b);

// |amp0|^2 + |amp1|^2.
double norm_squared(const PolarizationState& s);

}  // namespace pmqkd
