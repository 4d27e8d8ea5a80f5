#pragma once

// Closed-form A + B -> P with rate k[A][B].

#include <cmath>

namespace oracle {

// Organic concentration at t for organic a0 and oxidant b0 (b0 != a0).
inline double bimolecular_organic(double a0, double b0, double k, double t) {
    const double d = b0 - a0;
    return d * a0 / (b0 * std::exp(k * d * t) - a0);
}

inline double bimolecular_oxidant(double a0, double b0, double k, double t) {
    return b0 - (a0 - bimolecular_organic(a0, b0, k, t));
}

inline double bimolecular_product(double a0, double b0, double k, double t) {
    return a0 - bimolecular_organic(a0, b0, k, t);
}

} // namespace oracle
