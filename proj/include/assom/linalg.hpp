#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "assom/errors.hpp"

namespace assom {

// Feature vectors are plain dense doubles; all dimensions are small enough
// that a BLAS dependency would buy nothing.
using Vector = std::vector<double>;

inline double dot(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double squared_norm(const Vector& v) { return dot(v, v); }

inline double norm(const Vector& v) { return std::sqrt(squared_norm(v)); }

// y += c * x
inline void axpy(double c, const Vector& x, Vector& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline void scale(Vector& v, double c) {
    for (auto& e : v) e *= c;
}

inline Vector subtract(const Vector& a, const Vector& b) {
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline double squared_distance(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline bool all_finite(const Vector& v) {
    for (double e : v)
        if (!std::isfinite(e)) return false;
    return true;
}

inline void require_dim(const Vector& v, std::size_t dim, const char* what) {
    if (v.size() != dim)
        throw DimensionMismatch(std::string(what) + ": expected length " + std::to_string(dim) +
                                ", got " + std::to_string(v.size()));
}

} // namespace assom
