#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "assom/dataset.hpp"
#include "assom/errors.hpp"
#include "assom/linalg.hpp"

namespace assom {

// Brute-force k-nearest-neighbor vote over Euclidean distance. Distance ties
// break toward the lower train row position, so predictions are a pure
// function of (train order, k). Expects features z-scored with train-fit
// parameters. If fewer than k train rows exist the vote runs over all of
// them; a tied vote (only possible then) follows the nearest neighbor.
inline std::vector<ClassLabel> knn_classify(const Dataset& train,
                                            const std::vector<Vector>& test_features,
                                            std::size_t k) {
    if (train.rows() == 0) throw TooSmall("knn_classify: empty training set");
    if (k == 0 || k % 2 == 0)
        throw ConfigError("knn_classify: k must be odd and positive, got " + std::to_string(k));

    const std::size_t n = train.rows();
    const std::size_t k_eff = std::min(k, n);

    std::vector<ClassLabel> predictions;
    predictions.reserve(test_features.size());
    std::vector<std::pair<double, std::size_t>> dist(n);

    for (const auto& query : test_features) {
        require_dim(query, train.dim(), "knn query");
        for (std::size_t i = 0; i < n; ++i)
            dist[i] = {squared_distance(train.features[i], query), i};
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_eff),
                          dist.end());
        std::size_t minority_votes = 0;
        for (std::size_t i = 0; i < k_eff; ++i)
            if (train.labels[dist[i].second] == ClassLabel::minority) ++minority_votes;
        if (2 * minority_votes == k_eff)
            predictions.push_back(train.labels[dist[0].second]);
        else
            predictions.push_back(2 * minority_votes > k_eff ? ClassLabel::minority
                                                             : ClassLabel::majority);
    }
    return predictions;
}

} // namespace assom
