#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "assom/errors.hpp"
#include "assom/linalg.hpp"
#include "assom/rng.hpp"
#include "assom/subspace.hpp"

namespace assom {

// One competing unit: an orthonormal basis plus the copy taken at the start
// of the current epoch (reference point for dissipation).
struct AssomModule {
    std::size_t index = 0;
    BasisSet basis;
    BasisSet prev_basis;
};

struct AssomNetwork {
    std::size_t input_dim = 0;   // D
    std::size_t subspace_dim = 0; // H
    std::vector<AssomModule> modules;

    std::size_t size() const { return modules.size(); } // N
};

struct TrainingConfig {
    std::size_t epochs = 100;
    double eta_start = 0.1;
    double eta_end = 0.001;
    double sigma = 1.0;    // kernel width; assumes z-scored inputs
    double alpha = 1e-4;   // dissipation constant
    std::size_t episode_size = 1;
    std::uint64_t seed = 0;
    double denom_floor = 1e-9;

    void validate() const {
        if (eta_start <= 0.0 || eta_start > 1.0) throw ConfigError("eta_start must be in (0,1]");
        if (eta_end <= 0.0 || eta_end > 1.0) throw ConfigError("eta_end must be in (0,1]");
        if (eta_end > eta_start) throw ConfigError("eta_end must not exceed eta_start");
        if (sigma <= 0.0) throw ConfigError("sigma must be positive");
        if (alpha < 0.0) throw ConfigError("alpha must be non-negative");
        if (episode_size == 0) throw ConfigError("episode_size must be positive");
        if (denom_floor <= 0.0) throw ConfigError("denom_floor must be positive");
    }
};

// The set of samples over which one competition is decided.
struct Episode {
    std::vector<Vector> samples;
};

struct TrainingHistory {
    std::vector<double> cost;                 // per-epoch E
    std::vector<double> orthonormality_dev;   // per-epoch max |B^T B - I| over modules
};

// N modules with bases drawn uniform(-1,1) componentwise and orthonormalized.
// Deterministic for a given (D, H, N, seed). A degenerate draw is retried with
// fresh randomness up to 16 times before failing.
inline AssomNetwork init_network(std::size_t input_dim, std::size_t subspace_dim,
                                 std::size_t module_count, std::uint64_t seed) {
    if (subspace_dim == 0 || subspace_dim > input_dim)
        throw ConfigError("init_network: need 1 <= H <= D, got H=" + std::to_string(subspace_dim) +
                          " D=" + std::to_string(input_dim));
    if (module_count == 0) throw ConfigError("init_network: need at least one module");

    AssomNetwork net;
    net.input_dim = input_dim;
    net.subspace_dim = subspace_dim;
    net.modules.reserve(module_count);

    Rng rng(seed);
    for (std::size_t n = 0; n < module_count; ++n) {
        BasisSet basis;
        bool ok = false;
        for (int attempt = 0; attempt < 16 && !ok; ++attempt) {
            std::vector<Vector> draw(subspace_dim, Vector(input_dim));
            for (auto& v : draw)
                for (auto& e : v) e = rng.next_symmetric();
            try {
                basis = gram_schmidt(draw);
                ok = true;
            } catch (const DegenerateBasis&) {
                // retry with fresh draws
            }
        }
        if (!ok)
            throw DegenerateBasis("init_network: module " + std::to_string(n) +
                                  " failed orthonormalization after 16 attempts");
        net.modules.push_back({n, basis, basis});
    }
    return net;
}

// Winner = argmin over modules of the episode's summed squared residuals.
// Ties go to the lowest module index.
inline std::size_t find_winner(const AssomNetwork& net, const Episode& episode) {
    std::size_t best = 0;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < net.modules.size(); ++n) {
        double err = 0.0;
        for (const auto& x : episode.samples) err += residual_squared_norm(net.modules[n].basis, x);
        if (err < best_err) {
            best_err = err;
            best = n;
        }
    }
    return best;
}

// g = exp(-||xhat_winner - xhat_n||^2 / (2 sigma^2)), in (0,1].
inline double neighborhood_kernel(const Vector& xhat_winner, const Vector& xhat_n, double sigma) {
    return std::exp(-squared_distance(xhat_winner, xhat_n) / (2.0 * sigma * sigma));
}

// Network cost: sum over modules and samples of g * ||residual||^2, with the
// winner recomputed per episode against the current bases.
inline double cost(const AssomNetwork& net, const std::vector<Episode>& data, double sigma) {
    double total = 0.0;
    for (const auto& episode : data) {
        const std::size_t c = find_winner(net, episode);
        for (const auto& x : episode.samples) {
            const Vector xhat_c = project(net.modules[c].basis, x);
            for (const auto& module : net.modules) {
                const Vector xhat_n = project(module.basis, x);
                const double g = neighborhood_kernel(xhat_c, xhat_n, sigma);
                total += g * squared_norm(subtract(x, xhat_n));
            }
        }
    }
    return total;
}

// Per-sample gradient of the residual energy g * ||x_tilde||^2 with respect
// to one basis vector, with g held constant: -2 g (x . b) x.
inline Vector basis_gradient(double g, const Vector& x, const Vector& b) {
    Vector grad(x.size());
    const double coeff = -2.0 * g * dot(x, b);
    for (std::size_t i = 0; i < x.size(); ++i) grad[i] = coeff * x[i];
    return grad;
}

// b_i <- [I + lambda_bar x x^T / max(||xhat|| ||x||, floor)] b_i for every
// basis vector, with xhat taken from the basis before the update. Implemented
// without materializing the D x D matrix.
inline void update_module(AssomModule& module, const Vector& x, double lambda_bar,
                          double denom_floor) {
    const Vector xhat = project(module.basis, x);
    const double denom = std::max(norm(xhat) * norm(x), denom_floor);
    std::vector<Vector> updated = module.basis.vectors();
    for (auto& b : updated) {
        const double c = lambda_bar * dot(x, b) / denom;
        axpy(c, x, b);
    }
    // The updated vectors are generally no longer orthonormal; the caller
    // re-orthonormalizes after dissipation.
    module.basis = BasisSet::unchecked(std::move(updated));
}

// Componentwise shrink-toward-zero: eps = alpha |b_now - b_prev|,
// out_j = sgn(b_now_j) * max(0, |b_now_j| - eps_j).
inline Vector dissipate(const Vector& b_now, const Vector& b_prev, double alpha) {
    if (b_now.size() != b_prev.size())
        throw DimensionMismatch("dissipate: vector lengths differ");
    Vector out(b_now.size());
    for (std::size_t j = 0; j < b_now.size(); ++j) {
        const double eps = alpha * std::abs(b_now[j] - b_prev[j]);
        const double mag = std::abs(b_now[j]) - eps;
        const double sgn = (b_now[j] > 0.0) ? 1.0 : (b_now[j] < 0.0 ? -1.0 : 0.0);
        out[j] = mag > 0.0 ? sgn * mag : 0.0;
    }
    return out;
}

// Full training loop. Mutates the network in place and returns the per-epoch
// history. Deterministic for a fixed (network, data, config.seed).
//
// Per epoch: snapshot each basis (dissipation reference), shuffle the rows,
// group them into episodes, and for each episode
//   1. pick the winner by summed residual error,
//   2. update every module per sample, scaled by the reconstruction-distance
//      kernel against the winner (the winner itself gets g = 1),
//   3. dissipate each basis vector against its epoch-start copy,
//   4. re-orthonormalize.
// The learning rate decays linearly from eta_start to eta_end across epochs.
inline TrainingHistory train(AssomNetwork& net, const std::vector<Vector>& rows,
                             const TrainingConfig& config) {
    config.validate();
    for (const auto& row : rows) require_dim(row, net.input_dim, "training row");

    TrainingHistory history;
    if (config.epochs == 0) return history;

    // Cost is recorded against the unshuffled rows grouped in input order so
    // the history does not depend on the epoch's shuffle.
    std::vector<Episode> cost_episodes;
    for (std::size_t i = 0; i < rows.size(); i += config.episode_size) {
        Episode ep;
        for (std::size_t j = i; j < std::min(rows.size(), i + config.episode_size); ++j)
            ep.samples.push_back(rows[j]);
        cost_episodes.push_back(std::move(ep));
    }

    Rng rng(config.seed);
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const double frac =
            config.epochs > 1 ? static_cast<double>(epoch) / static_cast<double>(config.epochs - 1) : 0.0;
        const double eta = config.eta_start + (config.eta_end - config.eta_start) * frac;

        for (auto& module : net.modules) module.prev_basis = module.basis;
        rng.shuffle(order);

        for (std::size_t start = 0; start < order.size(); start += config.episode_size) {
            const std::size_t stop = std::min(order.size(), start + config.episode_size);
            Episode episode;
            for (std::size_t i = start; i < stop; ++i) episode.samples.push_back(rows[order[i]]);

            const std::size_t winner = find_winner(net, episode);

            for (const auto& x : episode.samples) {
                // Reconstructions of this sample by every module, all taken
                // before any of this sample's updates.
                std::vector<Vector> xhat(net.modules.size());
                for (std::size_t n = 0; n < net.modules.size(); ++n)
                    xhat[n] = project(net.modules[n].basis, x);
                for (std::size_t n = 0; n < net.modules.size(); ++n) {
                    const double g = neighborhood_kernel(xhat[winner], xhat[n], config.sigma);
                    update_module(net.modules[n], x, eta * g, config.denom_floor);
                }
            }

            for (std::size_t n = 0; n < net.modules.size(); ++n) {
                auto& module = net.modules[n];
                std::vector<Vector> vecs = module.basis.vectors();
                for (std::size_t i = 0; i < vecs.size(); ++i)
                    vecs[i] = dissipate(vecs[i], module.prev_basis.vector(i), config.alpha);
                try {
                    module.basis = gram_schmidt(vecs);
                } catch (const DegenerateBasis& e) {
                    throw DegenerateBasis("train: basis collapsed at epoch " + std::to_string(epoch) +
                                          ", module " + std::to_string(n) + ": " + e.what());
                }
            }
        }

        history.cost.push_back(cost(net, cost_episodes, config.sigma));
        double worst = 0.0;
        for (const auto& module : net.modules)
            worst = std::max(worst, module.basis.max_orthonormality_deviation());
        history.orthonormality_dev.push_back(worst);
    }
    return history;
}

} // namespace assom
