#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "assom/dataset.hpp"
#include "assom/errors.hpp"
#include "assom/linalg.hpp"
#include "assom/rng.hpp"

namespace assom {

struct SmoteProvenance {
    std::size_t source_row_index = 0;   // position within the input dataset
    std::size_t neighbor_row_index = 0; // parent minority row
    double u = 0.0;                     // interpolation coefficient
};

struct SmoteResult {
    Dataset augmented;
    std::vector<SmoteProvenance> provenance;
};

// Reference SMOTE: for each minority row x, amount_per_minority synthetic
// points s = x + u (x_nn - x), u ~ uniform(0,1), x_nn drawn from the k
// minority nearest neighbors (self excluded, distance ties to lower index).
inline SmoteResult smote_oversample(const Dataset& dataset, std::size_t k,
                                    std::size_t amount_per_minority, std::uint64_t seed) {
    if (k == 0) throw ConfigError("smote: k must be positive");
    const auto minority_idx = dataset.indices_of(ClassLabel::minority);
    if (minority_idx.size() <= k)
        throw TooFewMinority("smote: need more than k=" + std::to_string(k) +
                             " minority rows, got " + std::to_string(minority_idx.size()));

    SmoteResult result;
    result.augmented = dataset;
    if (amount_per_minority == 0) return result;

    // k nearest minority neighbors per minority row, by dataset position.
    std::vector<std::vector<std::size_t>> neighbors(minority_idx.size());
    for (std::size_t a = 0; a < minority_idx.size(); ++a) {
        std::vector<std::pair<double, std::size_t>> dist;
        dist.reserve(minority_idx.size() - 1);
        for (std::size_t b = 0; b < minority_idx.size(); ++b) {
            if (b == a) continue;
            dist.emplace_back(
                squared_distance(dataset.features[minority_idx[a]], dataset.features[minority_idx[b]]),
                minority_idx[b]);
        }
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        for (std::size_t i = 0; i < k; ++i) neighbors[a].push_back(dist[i].second);
    }

    Rng rng(seed);
    std::size_t next_id = kSyntheticIdBase;
    for (std::size_t a = 0; a < minority_idx.size(); ++a) {
        const std::size_t row = minority_idx[a];
        const Vector& x = dataset.features[row];
        for (std::size_t j = 0; j < amount_per_minority; ++j) {
            const std::size_t nn = neighbors[a][rng.next_below(k)];
            const double u = rng.next_double();
            Vector s = x;
            for (std::size_t c = 0; c < s.size(); ++c)
                s[c] += u * (dataset.features[nn][c] - x[c]);
            result.augmented.features.push_back(std::move(s));
            result.augmented.labels.push_back(ClassLabel::minority);
            result.augmented.raw_labels.push_back(dataset.minority_name);
            result.augmented.row_ids.push_back(next_id++);
            result.provenance.push_back({row, nn, u});
        }
    }
    return result;
}

} // namespace assom
