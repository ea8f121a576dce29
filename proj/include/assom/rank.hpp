#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "assom/errors.hpp"

namespace assom {

// Mean metric values laid out [dataset][method][metric], with the name lists
// fixing the (significant) listing order of methods.
struct ResultsGrid {
    std::vector<std::string> datasets;
    std::vector<std::string> methods;
    std::vector<std::string> metrics;
    std::vector<std::vector<std::vector<double>>> values;
};

// shared_points averages the points of a tied group; first_listed hands the
// higher points to the method listed earlier.
enum class TiePolicy { shared_points, first_listed };

struct RankTable {
    std::vector<std::string> datasets;
    std::vector<std::string> methods;
    std::vector<std::string> metrics;
    // points[dataset][metric][method]: best method gets M points, worst 1
    std::vector<std::vector<std::vector<double>>> points;
    // per_metric_average[metric][method]: mean points across datasets
    std::vector<std::vector<double>> per_metric_average;
    // overall[method]: mean of the per-metric averages
    std::vector<double> overall;
};

inline RankTable average_rank(const ResultsGrid& grid, TiePolicy ties = TiePolicy::shared_points) {
    const std::size_t n_datasets = grid.datasets.size();
    const std::size_t n_methods = grid.methods.size();
    const std::size_t n_metrics = grid.metrics.size();
    if (n_datasets == 0 || n_methods == 0 || n_metrics == 0)
        throw IncompleteGrid("average_rank: empty grid");
    if (grid.values.size() != n_datasets)
        throw IncompleteGrid("average_rank: dataset dimension mismatch");
    for (const auto& per_dataset : grid.values) {
        if (per_dataset.size() != n_methods)
            throw IncompleteGrid("average_rank: method dimension mismatch");
        for (const auto& per_method : per_dataset) {
            if (per_method.size() != n_metrics)
                throw IncompleteGrid("average_rank: metric dimension mismatch");
            for (double v : per_method)
                if (!std::isfinite(v)) throw IncompleteGrid("average_rank: missing cell value");
        }
    }

    RankTable table;
    table.datasets = grid.datasets;
    table.methods = grid.methods;
    table.metrics = grid.metrics;
    table.points.assign(n_datasets,
                        std::vector<std::vector<double>>(n_metrics, std::vector<double>(n_methods, 0.0)));

    for (std::size_t d = 0; d < n_datasets; ++d) {
        for (std::size_t k = 0; k < n_metrics; ++k) {
            std::vector<std::size_t> order(n_methods);
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const double va = grid.values[d][a][k];
                const double vb = grid.values[d][b][k];
                return va != vb ? va > vb : a < b;
            });
            // Points descend from M to 1 along the sorted order.
            std::size_t pos = 0;
            while (pos < n_methods) {
                std::size_t end = pos + 1;
                while (end < n_methods &&
                       grid.values[d][order[end]][k] == grid.values[d][order[pos]][k])
                    ++end;
                if (ties == TiePolicy::shared_points) {
                    double sum = 0.0;
                    for (std::size_t i = pos; i < end; ++i)
                        sum += static_cast<double>(n_methods - i);
                    const double share = sum / static_cast<double>(end - pos);
                    for (std::size_t i = pos; i < end; ++i) table.points[d][k][order[i]] = share;
                } else {
                    // Earlier-listed methods in the tied group take the
                    // higher points. order[] already breaks value ties by
                    // method index, so this is positional.
                    for (std::size_t i = pos; i < end; ++i)
                        table.points[d][k][order[i]] = static_cast<double>(n_methods - i);
                }
                pos = end;
            }
        }
    }

    table.per_metric_average.assign(n_metrics, std::vector<double>(n_methods, 0.0));
    for (std::size_t k = 0; k < n_metrics; ++k)
        for (std::size_t m = 0; m < n_methods; ++m) {
            double sum = 0.0;
            for (std::size_t d = 0; d < n_datasets; ++d) sum += table.points[d][k][m];
            table.per_metric_average[k][m] = sum / static_cast<double>(n_datasets);
        }

    table.overall.assign(n_methods, 0.0);
    for (std::size_t m = 0; m < n_methods; ++m) {
        double sum = 0.0;
        for (std::size_t k = 0; k < n_metrics; ++k) sum += table.per_metric_average[k][m];
        table.overall[m] = sum / static_cast<double>(n_metrics);
    }
    return table;
}

} // namespace assom
