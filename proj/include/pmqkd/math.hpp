#pragma once

namespace pmqkd {

// Binary entropy H(p) = -p log2 p - (1-p) log2 (1-p), with H(0) = H(1) = 0.
// Throws std::domain_error outside [0, 1].
double binary_entropy(double p);

// Modified Bessel function of the first kind, order zero, by power series
// sum_k (x/2)^(2k) / (k!)^2. Terms are accumulated until the next one drops
// below 1e-16 of the partial sum. Domain [0, 700] (overflow guard); throws
// std::domain_error outside it.
double bessel_i0(double x);

// bessel_i0(x) - 1 without the cancellation the subtraction would cost when
// x is small. Same series with the leading 1 dropped, same domain.
double bessel_i0_minus_one(double x);

}  // namespace pmqkd
