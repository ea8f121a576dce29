#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "assom/errors.hpp"
#include "assom/linalg.hpp"

namespace assom {

constexpr double kDependenceThreshold = 1e-12; // residual norm below this = linear dependence
constexpr double kOrthonormalTol = 1e-10;

// Orthonormal basis of an H-dimensional linear subspace of R^D.
class BasisSet {
public:
    BasisSet() = default;

    // Accepts vectors that are already orthonormal within `tol`; used by
    // deserialization and by tests constructing hand-picked bases.
    static BasisSet from_orthonormal(std::vector<Vector> vectors, double tol = kOrthonormalTol) {
        BasisSet b = unchecked(std::move(vectors));
        if (b.max_orthonormality_deviation() > tol)
            throw DegenerateBasis("vectors are not orthonormal within tolerance");
        return b;
    }

    // No orthonormality check. Training holds transient non-orthonormal
    // states between a gradient step and its re-orthonormalization.
    static BasisSet unchecked(std::vector<Vector> vectors) {
        BasisSet b;
        b.vectors_ = std::move(vectors);
        if (b.vectors_.empty()) throw DegenerateBasis("basis must contain at least one vector");
        b.dim_ = b.vectors_.front().size();
        for (const auto& v : b.vectors_) {
            require_dim(v, b.dim_, "basis vector");
            if (!all_finite(v)) throw DegenerateBasis("basis vector has non-finite components");
        }
        return b;
    }

    std::size_t dim() const { return dim_; }                    // ambient D
    std::size_t subspace_dim() const { return vectors_.size(); } // H
    const std::vector<Vector>& vectors() const { return vectors_; }
    const Vector& vector(std::size_t i) const { return vectors_[i]; }

    // max |B^T B - I| over all entries.
    double max_orthonormality_deviation() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < vectors_.size(); ++i) {
            for (std::size_t j = i; j < vectors_.size(); ++j) {
                const double target = (i == j) ? 1.0 : 0.0;
                const double dev = std::abs(dot(vectors_[i], vectors_[j]) - target);
                if (dev > worst) worst = dev;
            }
        }
        return worst;
    }

private:
    friend BasisSet gram_schmidt(const std::vector<Vector>& vectors);
    std::size_t dim_ = 0;
    std::vector<Vector> vectors_;
};

// D x D orthogonal projector, row-major. Symmetric by construction.
struct Projector {
    std::size_t dim = 0;
    std::vector<double> entries; // dim * dim

    double at(std::size_t r, std::size_t c) const { return entries[r * dim + c]; }
    double& at(std::size_t r, std::size_t c) { return entries[r * dim + c]; }

    Vector apply(const Vector& x) const {
        require_dim(x, dim, "projector input");
        Vector y(dim, 0.0);
        for (std::size_t r = 0; r < dim; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < dim; ++c) s += entries[r * dim + c] * x[c];
            y[r] = s;
        }
        return y;
    }
};

// Modified Gram-Schmidt. Throws DegenerateBasis when an intermediate residual
// collapses below kDependenceThreshold (linearly dependent input).
inline BasisSet gram_schmidt(const std::vector<Vector>& vectors) {
    if (vectors.empty()) throw DegenerateBasis("gram_schmidt: empty input");
    const std::size_t dim = vectors.front().size();
    if (vectors.size() > dim)
        throw DegenerateBasis("gram_schmidt: more vectors (" + std::to_string(vectors.size()) +
                              ") than ambient dimension " + std::to_string(dim));

    std::vector<Vector> basis;
    basis.reserve(vectors.size());
    for (std::size_t k = 0; k < vectors.size(); ++k) {
        require_dim(vectors[k], dim, "gram_schmidt input");
        Vector v = vectors[k];
        for (const auto& b : basis) axpy(-dot(b, v), b, v);
        const double n = norm(v);
        if (n < kDependenceThreshold)
            throw DegenerateBasis("gram_schmidt: vector " + std::to_string(k) +
                                  " is linearly dependent on its predecessors (residual norm " +
                                  std::to_string(n) + ")");
        scale(v, 1.0 / n);
        basis.push_back(std::move(v));
    }

    BasisSet out;
    out.dim_ = dim;
    out.vectors_ = std::move(basis);
    return out;
}

// x_hat = sum_i (b_i . x) b_i
inline Vector project(const BasisSet& basis, const Vector& x) {
    require_dim(x, basis.dim(), "project input");
    Vector xhat(basis.dim(), 0.0);
    for (const auto& b : basis.vectors()) axpy(dot(b, x), b, xhat);
    return xhat;
}

// x_tilde = x - x_hat
inline Vector residual(const BasisSet& basis, const Vector& x) {
    Vector r = project(basis, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = x[i] - r[i];
    return r;
}

inline double residual_squared_norm(const BasisSet& basis, const Vector& x) {
    return squared_norm(residual(basis, x));
}

// P = sum_i b_i b_i^T. Entry (r,c) and (c,r) come from identical products, so
// the result is exactly symmetric.
inline Projector projector_matrix(const BasisSet& basis) {
    Projector p;
    p.dim = basis.dim();
    p.entries.assign(p.dim * p.dim, 0.0);
    for (const auto& b : basis.vectors())
        for (std::size_t r = 0; r < p.dim; ++r)
            for (std::size_t c = 0; c < p.dim; ++c) p.at(r, c) += b[r] * b[c];
    return p;
}

} // namespace assom
