#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "assom/dataset.hpp"
#include "assom/errors.hpp"
#include "assom/linalg.hpp"
#include "assom/network.hpp"
#include "assom/rng.hpp"
#include "assom/subspace.hpp"

namespace assom {

// N = max(1, round(majority/minority) - 1), rounding half away from zero.
// The floor keeps the sampler meaningful for near-balanced inputs.
inline std::size_t compute_module_count(std::size_t n_majority, std::size_t n_minority) {
    if (n_minority == 0) throw EmptyClass("compute_module_count: minority class is empty");
    const double ratio = static_cast<double>(n_majority) / static_cast<double>(n_minority);
    const long long n = static_cast<long long>(std::llround(ratio)) - 1;
    return n < 1 ? 1 : static_cast<std::size_t>(n);
}

struct SelectionMode {
    enum Kind { keep_all, top_k } kind = keep_all;
    std::size_t k = 0;

    static SelectionMode all() { return {keep_all, 0}; }
    static SelectionMode top(std::size_t k) { return {top_k, k}; }
};

// How source points are chosen in the generation round. The default visits
// every minority row exactly once; random_rows draws with replacement.
struct SourceMode {
    enum Kind { every_row, random_rows } kind = every_row;
    std::size_t draw_count = 0; // random_rows only; 0 = minority size
};

struct OversampleConfig {
    std::optional<std::size_t> module_count_override;
    SelectionMode selection;
    bool balance_trim = true;
    std::size_t subspace_dim = 2; // H of the minority-class ASSOM
    SourceMode source;
    TrainingConfig training;
};

struct SyntheticProvenance {
    std::size_t source_row_index = 0; // position within the input dataset
    std::size_t module_index = 0;
    double reconstruction_error = 0.0;
};

struct SyntheticBatch {
    std::vector<Vector> samples;
    std::vector<SyntheticProvenance> provenance;

    std::size_t size() const { return samples.size(); }
};

// Minority-class ASSOM plus the centering vector. Subspaces pass through the
// origin, so minority data is centered on its mean before training and the
// mean is added back after reconstruction.
class AssomOversampler {
public:
    static AssomOversampler fit(const std::vector<Vector>& minority_features,
                                const OversampleConfig& config, std::size_t n_majority) {
        if (minority_features.empty())
            throw InsufficientData("oversampler fit: no minority samples");
        const std::size_t dim = minority_features.front().size();
        for (const auto& x : minority_features) require_dim(x, dim, "minority feature row");

        const std::size_t subspace_dim = config.subspace_dim;
        if (subspace_dim == 0 || subspace_dim > dim)
            throw ConfigError("oversampler fit: subspace_dim must be in [1, D], got " +
                              std::to_string(subspace_dim) + " with D=" + std::to_string(dim));
        if (minority_features.size() < subspace_dim + 1)
            throw InsufficientData("oversampler fit: need at least H+1 = " +
                                   std::to_string(subspace_dim + 1) + " minority samples, got " +
                                   std::to_string(minority_features.size()));

        AssomOversampler sampler;
        sampler.mu_.assign(dim, 0.0);
        for (const auto& x : minority_features) axpy(1.0, x, sampler.mu_);
        scale(sampler.mu_, 1.0 / static_cast<double>(minority_features.size()));

        std::vector<Vector> centered;
        centered.reserve(minority_features.size());
        double max_norm = 0.0;
        for (const auto& x : minority_features) {
            centered.push_back(subtract(x, sampler.mu_));
            max_norm = std::max(max_norm, norm(centered.back()));
        }
        if (max_norm < 1e-12)
            throw InsufficientVariance("oversampler fit: minority samples are all identical");

        sampler.module_count_ = config.module_count_override
                                    ? *config.module_count_override
                                    : compute_module_count(n_majority, minority_features.size());
        if (sampler.module_count_ == 0)
            throw ConfigError("oversampler fit: module count override must be positive");

        // Separate init and shuffle streams derived from the one config seed.
        AssomNetwork net = init_network(dim, subspace_dim, sampler.module_count_,
                                        derive_seed(config.training.seed, {1}));
        sampler.history_ = train(net, centered, config.training);
        sampler.network_ = std::move(net);
        return sampler;
    }

    // Assembles a sampler from an existing network (e.g. one loaded from its
    // JSON document) and a centering vector.
    static AssomOversampler from_parts(Vector mu, AssomNetwork network) {
        if (mu.size() != network.input_dim)
            throw DimensionMismatch("oversampler: centering vector length " +
                                    std::to_string(mu.size()) + " vs network D=" +
                                    std::to_string(network.input_dim));
        AssomOversampler sampler;
        sampler.mu_ = std::move(mu);
        sampler.module_count_ = network.modules.size();
        sampler.network_ = std::move(network);
        return sampler;
    }

    // Reconstructions of x through every module's subspace, in module order:
    // s_n = P_n (x - mu) + mu, error_n = ||(I - P_n)(x - mu)||.
    SyntheticBatch generate_for_sample(const Vector& x, std::size_t source_row_index = 0) const {
        require_dim(x, mu_.size(), "generate_for_sample input");
        const Vector centered = subtract(x, mu_);
        SyntheticBatch batch;
        for (const auto& module : network_.modules) {
            Vector s = project(module.basis, centered);
            const double err = norm(subtract(centered, s));
            for (std::size_t i = 0; i < s.size(); ++i) s[i] += mu_[i];
            batch.samples.push_back(std::move(s));
            batch.provenance.push_back({source_row_index, module.index, err});
        }
        return batch;
    }

    const Vector& mean() const { return mu_; }
    const AssomNetwork& network() const { return network_; }
    std::size_t module_count() const { return module_count_; }
    const TrainingHistory& history() const { return history_; }

private:
    Vector mu_;
    AssomNetwork network_;
    TrainingHistory history_;
    std::size_t module_count_ = 0;
};

struct OversampleResult {
    Dataset augmented;
    SyntheticBatch batch;
    AssomOversampler sampler;
};

// The full generation round: fit on the minority class, reconstruct each
// selected source point through every module, filter, trim, and append the
// survivors with the minority label. Original rows stay first and verbatim.
inline OversampleResult oversample(const Dataset& dataset, const OversampleConfig& config) {
    const auto minority_idx = dataset.indices_of(ClassLabel::minority);
    const std::size_t n_minority = minority_idx.size();
    const std::size_t n_majority = dataset.rows() - n_minority;
    if (n_minority == 0) throw EmptyClass("oversample: dataset has no minority rows");

    std::vector<Vector> minority_features;
    minority_features.reserve(n_minority);
    for (std::size_t i : minority_idx) minority_features.push_back(dataset.features[i]);

    OversampleResult result;
    result.sampler = AssomOversampler::fit(minority_features, config, n_majority);
    const std::size_t module_count = result.sampler.module_count();

    if (config.selection.kind == SelectionMode::top_k && config.selection.k > module_count)
        throw ConfigError("oversample: top_k k=" + std::to_string(config.selection.k) +
                          " exceeds module count N=" + std::to_string(module_count));

    std::vector<std::size_t> sources;
    if (config.source.kind == SourceMode::every_row) {
        sources = minority_idx;
    } else {
        const std::size_t draws =
            config.source.draw_count == 0 ? n_minority : config.source.draw_count;
        Rng rng(derive_seed(config.training.seed, {3}));
        for (std::size_t i = 0; i < draws; ++i)
            sources.push_back(minority_idx[rng.next_below(n_minority)]);
    }

    SyntheticBatch pool;
    for (std::size_t row : sources) {
        SyntheticBatch all = result.sampler.generate_for_sample(dataset.features[row], row);
        if (config.selection.kind == SelectionMode::keep_all) {
            for (std::size_t i = 0; i < all.size(); ++i) {
                pool.samples.push_back(std::move(all.samples[i]));
                pool.provenance.push_back(all.provenance[i]);
            }
        } else {
            // Keep the k lowest reconstruction errors; ties to lower module.
            std::vector<std::size_t> order(all.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const double ea = all.provenance[a].reconstruction_error;
                const double eb = all.provenance[b].reconstruction_error;
                return ea != eb ? ea < eb : a < b;
            });
            order.resize(config.selection.k);
            std::sort(order.begin(), order.end()); // emit in module order
            for (std::size_t i : order) {
                pool.samples.push_back(std::move(all.samples[i]));
                pool.provenance.push_back(all.provenance[i]);
            }
        }
    }

    if (config.balance_trim) {
        const std::size_t deficit = n_majority > n_minority ? n_majority - n_minority : 0;
        if (pool.size() > deficit) {
            std::vector<std::size_t> order(pool.size());
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const double ea = pool.provenance[a].reconstruction_error;
                const double eb = pool.provenance[b].reconstruction_error;
                return ea != eb ? ea < eb : a < b;
            });
            order.resize(deficit);
            std::sort(order.begin(), order.end()); // back to (source row, module) order
            SyntheticBatch trimmed;
            for (std::size_t i : order) {
                trimmed.samples.push_back(std::move(pool.samples[i]));
                trimmed.provenance.push_back(pool.provenance[i]);
            }
            pool = std::move(trimmed);
        }
    }

    result.augmented = dataset;
    std::size_t next_id = kSyntheticIdBase;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        result.augmented.features.push_back(pool.samples[i]);
        result.augmented.labels.push_back(ClassLabel::minority);
        result.augmented.raw_labels.push_back(dataset.minority_name);
        result.augmented.row_ids.push_back(next_id++);
    }
    result.batch = std::move(pool);
    return result;
}

// Sidecar provenance CSV: one row per synthetic sample.
inline void write_provenance_csv(const SyntheticBatch& batch, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "source_row,module,reconstruction_error\n";
    for (const auto& p : batch.provenance)
        out << p.source_row_index << "," << p.module_index << ","
            << detail::format_double(p.reconstruction_error) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

} // namespace assom
