#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "assom/dataset.hpp"
#include "assom/errors.hpp"

namespace assom {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
};

struct MetricReport {
    double precision = 0.0;
    double recall = 0.0;
    double g_mean = 0.0;
    double f1 = 0.0;
    ConfusionCounts counts;
};

// Minority is the positive class.
inline ConfusionCounts confusion(const std::vector<ClassLabel>& y_true,
                                 const std::vector<ClassLabel>& y_pred) {
    if (y_true.size() != y_pred.size())
        throw LengthMismatch("confusion: " + std::to_string(y_true.size()) + " true vs " +
                             std::to_string(y_pred.size()) + " predicted labels");
    ConfusionCounts c;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const bool actual = y_true[i] == ClassLabel::minority;
        const bool predicted = y_pred[i] == ClassLabel::minority;
        if (actual && predicted) ++c.tp;
        else if (!actual && predicted) ++c.fp;
        else if (actual && !predicted) ++c.fn;
        else ++c.tn;
    }
    return c;
}

// precision = tp/(tp+fp), recall = tp/(tp+fn),
// g_mean = sqrt(recall * tn/(fp+tn)), f1 = harmonic mean of precision/recall.
// A vanishing denominator yields 0 for that metric.
inline MetricReport metrics(const ConfusionCounts& c) {
    MetricReport r;
    r.counts = c;
    const auto ratio = [](std::size_t num, std::size_t den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    r.precision = ratio(c.tp, c.tp + c.fp);
    r.recall = ratio(c.tp, c.tp + c.fn);
    r.g_mean = std::sqrt(r.recall * ratio(c.tn, c.fp + c.tn));
    r.f1 = (r.precision + r.recall) == 0.0
               ? 0.0
               : 2.0 * r.recall * r.precision / (r.recall + r.precision);
    return r;
}

inline double metric_by_name(const MetricReport& r, const std::string& name) {
    if (name == "precision") return r.precision;
    if (name == "recall") return r.recall;
    if (name == "g_mean") return r.g_mean;
    if (name == "f1") return r.f1;
    throw ConfigError("unknown metric: " + name);
}

inline const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names = {"recall", "precision", "f1", "g_mean"};
    return names;
}

} // namespace assom
