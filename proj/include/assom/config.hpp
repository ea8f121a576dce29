#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "assom/dataset.hpp"
#include "assom/errors.hpp"
#include "assom/network.hpp"
#include "assom/oversample.hpp"
#include "assom/toml_lite.hpp"

namespace assom {

struct DatasetSpec {
    std::string name;
    std::string path;
    CsvOptions csv;
    std::set<std::string> positive_labels;
};

struct SmoteConfig {
    std::size_t k = 5;
    std::size_t amount = 0; // 0 = auto: max(1, round(majority/minority) - 1)
};

struct ExperimentConfig {
    std::uint64_t master_seed = 0;
    std::string output_dir = "out";
    std::vector<std::string> methods = {"none", "assom", "smote"};
    std::size_t outer_repetitions = 5;
    std::size_t inner_repetitions = 5;
    double train_fraction = 0.7;
    std::size_t knn_k = 5;
    std::string format = "both"; // json | csv | both
    TrainingConfig training;
    OversampleConfig oversample;
    SmoteConfig smote;
    std::vector<DatasetSpec> datasets;

    void validate() const {
        if (outer_repetitions == 0 || inner_repetitions == 0)
            throw ConfigError("repetitions must be at least 1");
        if (train_fraction <= 0.0 || train_fraction >= 1.0)
            throw ConfigError("train_fraction must be in (0,1)");
        if (knn_k == 0 || knn_k % 2 == 0) throw ConfigError("knn_k must be odd and positive");
        if (format != "json" && format != "csv" && format != "both")
            throw ConfigError("format must be json, csv, or both");
        if (datasets.empty()) throw ConfigError("at least one [[dataset]] block is required");
        for (const auto& m : methods)
            if (m != "none" && m != "assom" && m != "smote")
                throw ConfigError("unknown method '" + m + "' (expected none, assom, smote)");
        if (methods.empty()) throw ConfigError("at least one method is required");
        training.validate();
        for (const auto& ds : datasets) {
            if (ds.name.empty()) throw ConfigError("dataset block missing name");
            if (ds.positive_labels.empty())
                throw ConfigError("dataset '" + ds.name + "' missing positive_labels");
            if (!std::filesystem::exists(ds.path))
                throw ConfigError("dataset '" + ds.name + "': no such file: " + ds.path);
        }
    }
};

namespace detail {

template <typename T>
T get_or(const nlohmann::json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

inline TrainingConfig training_from_json(const nlohmann::json& t, TrainingConfig base = {}) {
    base.epochs = get_or<std::size_t>(t, "epochs", base.epochs);
    base.eta_start = get_or<double>(t, "eta_start", base.eta_start);
    base.eta_end = get_or<double>(t, "eta_end", base.eta_end);
    base.sigma = get_or<double>(t, "sigma", base.sigma);
    base.alpha = get_or<double>(t, "alpha", base.alpha);
    base.episode_size = get_or<std::size_t>(t, "episode_size", base.episode_size);
    base.seed = get_or<std::uint64_t>(t, "seed", base.seed);
    base.denom_floor = get_or<double>(t, "denom_floor", base.denom_floor);
    return base;
}

inline OversampleConfig oversample_from_json(const nlohmann::json& o, const TrainingConfig& training) {
    OversampleConfig cfg;
    cfg.training = training;
    cfg.subspace_dim = get_or<std::size_t>(o, "subspace_dim", cfg.subspace_dim);
    cfg.balance_trim = get_or<bool>(o, "balance_trim", cfg.balance_trim);
    if (o.contains("module_count_override"))
        cfg.module_count_override = o.at("module_count_override").get<std::size_t>();
    const std::string selection = get_or<std::string>(o, "selection", "keep_all");
    if (selection == "keep_all") {
        cfg.selection = SelectionMode::all();
    } else if (selection == "top_k") {
        if (!o.contains("top_k")) throw ConfigError("selection = top_k requires a top_k value");
        cfg.selection = SelectionMode::top(o.at("top_k").get<std::size_t>());
    } else {
        throw ConfigError("unknown selection mode '" + selection + "'");
    }
    const std::string source = get_or<std::string>(o, "source", "every_row");
    if (source == "every_row") {
        cfg.source.kind = SourceMode::every_row;
    } else if (source == "random_rows") {
        cfg.source.kind = SourceMode::random_rows;
        cfg.source.draw_count = get_or<std::size_t>(o, "draw_count", 0);
    } else {
        throw ConfigError("unknown source mode '" + source + "'");
    }
    return cfg;
}

inline DatasetSpec dataset_from_json(const nlohmann::json& d) {
    DatasetSpec spec;
    spec.name = get_or<std::string>(d, "name", "");
    spec.path = get_or<std::string>(d, "path", "");
    if (spec.path.empty()) throw ConfigError("dataset '" + spec.name + "' missing path");
    spec.csv.has_header = get_or<bool>(d, "has_header", true);
    const std::string delim = get_or<std::string>(d, "delimiter", ",");
    if (delim.size() != 1) throw ConfigError("delimiter must be a single character");
    spec.csv.delimiter = delim[0];
    if (d.contains("label_column")) {
        const auto& lc = d.at("label_column");
        if (lc.is_number_unsigned() || lc.is_number_integer())
            spec.csv.label_column = lc.get<std::size_t>();
        else
            spec.csv.label_column = lc.get<std::string>();
    }
    for (const auto& l : d.value("positive_labels", nlohmann::json::array()))
        spec.positive_labels.insert(l.get<std::string>());
    return spec;
}

} // namespace detail

// Builds an ExperimentConfig from a parsed config document (see README for
// the schema). Throws ConfigError / ParseError on malformed input.
inline ExperimentConfig experiment_config_from_json(const nlohmann::json& doc) {
    ExperimentConfig cfg;
    cfg.master_seed = detail::get_or<std::uint64_t>(doc, "master_seed", cfg.master_seed);
    cfg.output_dir = detail::get_or<std::string>(doc, "output_dir", cfg.output_dir);
    cfg.outer_repetitions =
        detail::get_or<std::size_t>(doc, "outer_repetitions", cfg.outer_repetitions);
    cfg.inner_repetitions =
        detail::get_or<std::size_t>(doc, "inner_repetitions", cfg.inner_repetitions);
    cfg.train_fraction = detail::get_or<double>(doc, "train_fraction", cfg.train_fraction);
    cfg.knn_k = detail::get_or<std::size_t>(doc, "knn_k", cfg.knn_k);
    cfg.format = detail::get_or<std::string>(doc, "format", cfg.format);
    if (doc.contains("methods")) {
        cfg.methods.clear();
        for (const auto& m : doc.at("methods")) cfg.methods.push_back(m.get<std::string>());
    }
    if (doc.contains("training")) cfg.training = detail::training_from_json(doc.at("training"));
    cfg.oversample = detail::oversample_from_json(
        doc.contains("oversample") ? doc.at("oversample") : nlohmann::json::object(), cfg.training);
    if (doc.contains("smote")) {
        cfg.smote.k = detail::get_or<std::size_t>(doc.at("smote"), "k", cfg.smote.k);
        cfg.smote.amount = detail::get_or<std::size_t>(doc.at("smote"), "amount", cfg.smote.amount);
    }
    if (doc.contains("dataset"))
        for (const auto& d : doc.at("dataset")) cfg.datasets.push_back(detail::dataset_from_json(d));
    return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    return experiment_config_from_json(toml_lite::parse_file(path));
}

} // namespace assom
