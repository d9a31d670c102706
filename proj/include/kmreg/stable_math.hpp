#pragma once

#include <cmath>

// Hyperbolic ratios written in terms of decaying exponentials so that they
// stay finite for arguments far beyond the ~710 where cosh overflows.
namespace kmreg::stable {

/// cosh(a) / cosh(b) for 0 <= a, b.
inline double cosh_ratio(double a, double b) {
    return std::exp(a - b) * (1.0 + std::exp(-2.0 * a)) / (1.0 + std::exp(-2.0 * b));
}

/// sinh(a) / cosh(b) for 0 <= a, b.
inline double sinh_cosh_ratio(double a, double b) {
    return std::exp(a - b) * (-std::expm1(-2.0 * a)) / (1.0 + std::exp(-2.0 * b));
}

/// 1 / cosh(x)^2 = 1 - tanh(x)^2, computed without cancellation.
inline double sech_squared(double x) {
    const double e = std::exp(-2.0 * std::abs(x));
    const double d = 1.0 + e;
    return 4.0 * e / (d * d);
}

inline double tanh_squared(double x) {
    const double t = std::tanh(x);
    return t * t;
}

}  // namespace kmreg::stable
