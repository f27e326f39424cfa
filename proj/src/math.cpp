#include "pmqkd/math.hpp"

#include <cmath>
#include <stdexcept>

namespace pmqkd {

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::domain_error("binary_entropy: argument must lie in [0, 1]");
    }
    if (p == 0.0 || p == 1.0) {
        return 0.0;
    }
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double bessel_i0(double x) {
    if (!(x >= 0.0 && x <= 700.0)) {
        throw std::domain_error("bessel_i0: argument must lie in [0, 700]");
    }
    const double q = x * x / 4.0;
    double sum = 1.0;
    double term = 1.0;
    for (int k = 1; term >= 1e-16 * sum; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
    }
    return sum;
}

double bessel_i0_minus_one(double x) {
    if (!(x >= 0.0 && x <= 700.0)) {
        throw std::domain_error("bessel_i0_minus_one: argument must lie in [0, 700]");
    }
    const double q = x * x / 4.0;
    double sum = 0.0;
    double term = 1.0;
    for (int k = 1; term >= 1e-16 * (1.0 + sum); ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
    }
    return sum;
}

}  // namespace pmqkd
