#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "assom/config.hpp"
#include "assom/dataset.hpp"
#include "assom/errors.hpp"
#include "assom/knn.hpp"
#include "assom/metrics.hpp"
#include "assom/oversample.hpp"
#include "assom/rank.hpp"
#include "assom/rng.hpp"
#include "assom/smote.hpp"
#include "assom/version.hpp"

namespace assom {

// Seed streams hanging off (master, dataset index, outer repetition). Adding
// datasets or repetitions never perturbs existing streams.
namespace seed_stream {
inline constexpr std::uint64_t split = 0;
inline constexpr std::uint64_t assom_fit = 1;
inline constexpr std::uint64_t smote_fit = 2;
inline constexpr std::uint64_t inner_order = 3;
} // namespace seed_stream

struct CellResult {
    std::size_t dataset = 0;
    std::size_t method = 0;
    std::size_t outer = 0;
    std::size_t inner = 0;
    MetricReport report;
    std::optional<std::string> error; // failure marker; report fields are zero
};

// One fitting step and the identities of every row it consumed.
struct FitAuditEntry {
    std::string dataset;
    std::string method; // "-" for method-independent steps
    std::size_t outer = 0;
    std::string operation;
    std::vector<std::size_t> row_ids;
};

struct RunReport {
    std::string artifact_version = kArtifactVersion;
    std::uint64_t master_seed = 0;
    nlohmann::json config_echo;
    std::vector<std::string> datasets;
    std::vector<std::string> methods;
    std::vector<CellResult> cells; // ordered by (dataset, method, outer, inner)
    // aggregate[d][m][metric] -> (mean, population std) over repetitions
    std::vector<std::vector<std::vector<std::pair<double, double>>>> aggregates;
    RankTable ranks;
    bool complete = true;
    std::vector<FitAuditEntry> audit;
    std::vector<std::string> protocol_notes;
};

// Echo of the experiment-defining parameters. Delivery details (output
// directory, report format) stay out so the report bytes depend only on the
// experiment itself.
inline nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["master_seed"] = cfg.master_seed;
    j["methods"] = cfg.methods;
    j["outer_repetitions"] = cfg.outer_repetitions;
    j["inner_repetitions"] = cfg.inner_repetitions;
    j["train_fraction"] = cfg.train_fraction;
    j["knn_k"] = cfg.knn_k;
    j["training"] = {{"epochs", cfg.training.epochs},
                     {"eta_start", cfg.training.eta_start},
                     {"eta_end", cfg.training.eta_end},
                     {"sigma", cfg.training.sigma},
                     {"alpha", cfg.training.alpha},
                     {"episode_size", cfg.training.episode_size},
                     {"seed", cfg.training.seed},
                     {"denom_floor", cfg.training.denom_floor}};
    j["oversample"] = {{"subspace_dim", cfg.oversample.subspace_dim},
                       {"balance_trim", cfg.oversample.balance_trim},
                       {"selection", cfg.oversample.selection.kind == SelectionMode::keep_all
                                         ? "keep_all"
                                         : "top_k"},
                       {"top_k", cfg.oversample.selection.k},
                       {"source", cfg.oversample.source.kind == SourceMode::every_row
                                      ? "every_row"
                                      : "random_rows"}};
    if (cfg.oversample.module_count_override)
        j["oversample"]["module_count_override"] = *cfg.oversample.module_count_override;
    j["smote"] = {{"k", cfg.smote.k}, {"amount", cfg.smote.amount}};
    j["dataset"] = nlohmann::json::array();
    for (const auto& d : cfg.datasets) {
        nlohmann::json e;
        e["name"] = d.name;
        e["path"] = d.path;
        e["has_header"] = d.csv.has_header;
        e["delimiter"] = std::string(1, d.csv.delimiter);
        if (std::holds_alternative<std::size_t>(d.csv.label_column))
            e["label_column"] = std::get<std::size_t>(d.csv.label_column);
        else
            e["label_column"] = std::get<std::string>(d.csv.label_column);
        e["positive_labels"] = d.positive_labels;
        j["dataset"].push_back(std::move(e));
    }
    return j;
}

namespace detail {

struct CellJobResult {
    std::vector<CellResult> cells; // methods x inner, ordered
    std::vector<FitAuditEntry> audit;
};

inline Dataset with_features(const Dataset& ds, std::vector<Vector> features) {
    Dataset out = ds;
    out.features = std::move(features);
    return out;
}

inline Dataset permute_rows(const Dataset& ds, Rng& rng) {
    std::vector<std::size_t> order(ds.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    return take_rows(ds, order);
}

// Everything that happens for one (dataset, outer repetition) pair: split,
// train-only normalization, per-method augmentation, and the inner
// evaluation loop.
inline CellJobResult run_cell(const ExperimentConfig& cfg, const Dataset& full,
                              std::size_t dataset_index, std::size_t outer) {
    CellJobResult out;
    const std::string& ds_name = cfg.datasets[dataset_index].name;
    const std::uint64_t d = dataset_index;

    SplitSpec split_spec;
    split_spec.train_fraction = cfg.train_fraction;
    split_spec.seed = derive_seed(cfg.master_seed, {d, outer, seed_stream::split});
    auto [train, test] = stratified_split(full, split_spec);

    const NormalizationParams norm = zscore_fit(train);
    out.audit.push_back({ds_name, "-", outer, "zscore_fit", train.row_ids});

    const Dataset train_norm = with_features(train, zscore_apply(norm, train.features));
    const std::vector<Vector> test_norm = zscore_apply(norm, test.features);

    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
        const std::string& method = cfg.methods[m];
        Dataset augmented;
        std::optional<std::string> method_error;

        try {
            if (method == "none") {
                augmented = train_norm;
            } else if (method == "assom") {
                OversampleConfig ocfg = cfg.oversample;
                ocfg.training.seed =
                    derive_seed(cfg.master_seed, {d, outer, seed_stream::assom_fit});
                OversampleResult res = oversample(train_norm, ocfg);
                augmented = std::move(res.augmented);
                std::vector<std::size_t> minority_ids;
                for (std::size_t i : train_norm.indices_of(ClassLabel::minority))
                    minority_ids.push_back(train_norm.row_ids[i]);
                out.audit.push_back({ds_name, method, outer, "assom_fit", std::move(minority_ids)});
            } else { // smote
                const std::size_t n_min = train_norm.count(ClassLabel::minority);
                const std::size_t n_maj = train_norm.rows() - n_min;
                const std::size_t amount = cfg.smote.amount != 0
                                               ? cfg.smote.amount
                                               : compute_module_count(n_maj, n_min);
                SmoteResult res = smote_oversample(
                    train_norm, cfg.smote.k, amount,
                    derive_seed(cfg.master_seed, {d, outer, seed_stream::smote_fit}));
                augmented = std::move(res.augmented);
                std::vector<std::size_t> minority_ids;
                for (std::size_t i : train_norm.indices_of(ClassLabel::minority))
                    minority_ids.push_back(train_norm.row_ids[i]);
                out.audit.push_back({ds_name, method, outer, "smote_fit", std::move(minority_ids)});
            }
            out.audit.push_back({ds_name, method, outer, "knn_train", augmented.row_ids});
        } catch (const Error& e) {
            method_error = e.what();
        }

        for (std::size_t inner = 0; inner < cfg.inner_repetitions; ++inner) {
            CellResult cell;
            cell.dataset = dataset_index;
            cell.method = m;
            cell.outer = outer;
            cell.inner = inner;
            if (method_error) {
                cell.error = method_error;
            } else {
                Rng order_rng(
                    derive_seed(cfg.master_seed, {d, outer, seed_stream::inner_order, inner}));
                const Dataset shuffled = permute_rows(augmented, order_rng);
                const auto predicted = knn_classify(shuffled, test_norm, cfg.knn_k);
                cell.report = metrics(confusion(test.labels, predicted));
            }
            out.cells.push_back(std::move(cell));
        }
    }
    return out;
}

} // namespace detail

// Runs the full protocol: for each dataset x outer repetition, a ratio-
// preserving split, train-only fitting, per-method augmentation, and inner
// classifier repetitions that reseed only the training-row order. Cells fail
// independently; a failed cell is marked and excluded from aggregates, and
// the rank table is only built for a complete grid.
inline RunReport run_compare(const ExperimentConfig& cfg, std::size_t jobs = 1) {
    cfg.validate();

    RunReport report;
    report.master_seed = cfg.master_seed;
    report.config_echo = experiment_config_to_json(cfg);
    report.methods = cfg.methods;
    report.protocol_notes = {
        "inner repetitions reseed only the training-row order; the k-NN harness classifier is "
        "deterministic and has no initial-state restarts",
        "per-repetition seeds derive from (master_seed, dataset_index, outer_repetition, stream"
        "[, inner_repetition]) via splitmix64"};

    std::vector<Dataset> loaded;
    for (const auto& spec : cfg.datasets) {
        RawTable table = load_csv(spec.path, spec.csv);
        Dataset ds = binarize(table, spec.positive_labels);
        ds.name = spec.name;
        report.datasets.push_back(spec.name);
        loaded.push_back(std::move(ds));
    }

    const std::size_t n_cells = loaded.size() * cfg.outer_repetitions;
    std::vector<detail::CellJobResult> slots(n_cells);
    std::atomic<std::size_t> next{0};
    const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, n_cells));

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_cells) return;
            const std::size_t d = i / cfg.outer_repetitions;
            const std::size_t r = i % cfg.outer_repetitions;
            slots[i] = detail::run_cell(cfg, loaded[d], d, r);
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // Merge in (dataset, method, outer, inner) order regardless of scheduling.
    for (std::size_t d = 0; d < loaded.size(); ++d)
        for (std::size_t m = 0; m < cfg.methods.size(); ++m)
            for (std::size_t r = 0; r < cfg.outer_repetitions; ++r) {
                const auto& slot = slots[d * cfg.outer_repetitions + r];
                for (const auto& cell : slot.cells)
                    if (cell.method == m) report.cells.push_back(cell);
            }
    for (std::size_t d = 0; d < loaded.size(); ++d)
        for (std::size_t r = 0; r < cfg.outer_repetitions; ++r)
            for (const auto& entry : slots[d * cfg.outer_repetitions + r].audit)
                report.audit.push_back(entry);

    const auto& names = metric_names();
    report.aggregates.assign(
        loaded.size(),
        std::vector<std::vector<std::pair<double, double>>>(
            cfg.methods.size(), std::vector<std::pair<double, double>>(names.size(), {0.0, 0.0})));

    ResultsGrid grid;
    grid.datasets = report.datasets;
    grid.methods = cfg.methods;
    grid.metrics = names;
    grid.values.assign(loaded.size(),
                       std::vector<std::vector<double>>(
                           cfg.methods.size(),
                           std::vector<double>(names.size(), std::nan(""))));

    for (std::size_t d = 0; d < loaded.size(); ++d)
        for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
            std::vector<const CellResult*> ok;
            for (const auto& cell : report.cells)
                if (cell.dataset == d && cell.method == m) {
                    if (cell.error) report.complete = false;
                    else ok.push_back(&cell);
                }
            if (ok.empty()) continue;
            for (std::size_t k = 0; k < names.size(); ++k) {
                double mean = 0.0;
                for (const auto* cell : ok) mean += metric_by_name(cell->report, names[k]);
                mean /= static_cast<double>(ok.size());
                double var = 0.0;
                for (const auto* cell : ok) {
                    const double dlt = metric_by_name(cell->report, names[k]) - mean;
                    var += dlt * dlt;
                }
                var /= static_cast<double>(ok.size());
                report.aggregates[d][m][k] = {mean, std::sqrt(var)};
                grid.values[d][m][k] = mean;
            }
        }

    if (report.complete) report.ranks = average_rank(grid);
    return report;
}

// --- report serialization ---------------------------------------------------

inline nlohmann::json report_to_json(const RunReport& report) {
    nlohmann::json j;
    j["artifact_version"] = report.artifact_version;
    j["master_seed"] = report.master_seed;
    j["complete"] = report.complete;
    j["config"] = report.config_echo;
    j["protocol_notes"] = report.protocol_notes;
    j["datasets"] = report.datasets;
    j["methods"] = report.methods;
    j["metrics"] = metric_names();

    j["cells"] = nlohmann::json::array();
    for (const auto& cell : report.cells) {
        nlohmann::json c;
        c["dataset"] = report.datasets[cell.dataset];
        c["method"] = report.methods[cell.method];
        c["outer"] = cell.outer;
        c["inner"] = cell.inner;
        if (cell.error) {
            c["error"] = *cell.error;
        } else {
            c["counts"] = {{"tp", cell.report.counts.tp},
                           {"fp", cell.report.counts.fp},
                           {"tn", cell.report.counts.tn},
                           {"fn", cell.report.counts.fn}};
            for (const auto& name : metric_names())
                c["metrics"][name] = metric_by_name(cell.report, name);
        }
        j["cells"].push_back(std::move(c));
    }

    for (std::size_t d = 0; d < report.datasets.size(); ++d)
        for (std::size_t m = 0; m < report.methods.size(); ++m)
            for (std::size_t k = 0; k < metric_names().size(); ++k) {
                const auto& agg = report.aggregates[d][m][k];
                j["aggregates"][report.datasets[d]][report.methods[m]][metric_names()[k]] = {
                    {"mean", agg.first}, {"std", agg.second}};
            }

    if (report.complete) {
        nlohmann::json ranks;
        for (std::size_t d = 0; d < report.datasets.size(); ++d)
            for (std::size_t k = 0; k < metric_names().size(); ++k)
                for (std::size_t m = 0; m < report.methods.size(); ++m)
                    ranks["points"][report.datasets[d]][metric_names()[k]][report.methods[m]] =
                        report.ranks.points[d][k][m];
        for (std::size_t k = 0; k < metric_names().size(); ++k)
            for (std::size_t m = 0; m < report.methods.size(); ++m)
                ranks["per_metric_average"][metric_names()[k]][report.methods[m]] =
                    report.ranks.per_metric_average[k][m];
        for (std::size_t m = 0; m < report.methods.size(); ++m)
            ranks["overall"][report.methods[m]] = report.ranks.overall[m];
        j["rank_table"] = std::move(ranks);
    }
    return j;
}

inline nlohmann::json audit_to_json(const RunReport& report) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& entry : report.audit) {
        nlohmann::json e;
        e["dataset"] = entry.dataset;
        e["method"] = entry.method;
        e["outer"] = entry.outer;
        e["operation"] = entry.operation;
        e["row_ids"] = entry.row_ids;
        j.push_back(std::move(e));
    }
    return j;
}

inline void write_report_csv(const RunReport& report, const std::string& dir) {
    namespace fs = std::filesystem;
    {
        std::ofstream out(fs::path(dir) / "cells.csv", std::ios::binary);
        if (!out) throw IoError("cannot write cells.csv under " + dir);
        out << "dataset,method,outer,inner,tp,fp,tn,fn,recall,precision,f1,g_mean,error\n";
        for (const auto& cell : report.cells) {
            out << report.datasets[cell.dataset] << "," << report.methods[cell.method] << ","
                << cell.outer << "," << cell.inner << ",";
            if (cell.error) {
                out << ",,,,,,,," << detail::csv_escape(*cell.error, ',') << "\n";
            } else {
                out << cell.report.counts.tp << "," << cell.report.counts.fp << ","
                    << cell.report.counts.tn << "," << cell.report.counts.fn;
                for (const auto& name : metric_names())
                    out << "," << detail::format_double(metric_by_name(cell.report, name));
                out << ",\n";
            }
        }
    }
    {
        std::ofstream out(fs::path(dir) / "aggregates.csv", std::ios::binary);
        if (!out) throw IoError("cannot write aggregates.csv under " + dir);
        out << "dataset,method,metric,mean,std\n";
        for (std::size_t d = 0; d < report.datasets.size(); ++d)
            for (std::size_t m = 0; m < report.methods.size(); ++m)
                for (std::size_t k = 0; k < metric_names().size(); ++k)
                    out << report.datasets[d] << "," << report.methods[m] << ","
                        << metric_names()[k] << ","
                        << detail::format_double(report.aggregates[d][m][k].first) << ","
                        << detail::format_double(report.aggregates[d][m][k].second) << "\n";
    }
    if (report.complete) {
        std::ofstream out(fs::path(dir) / "ranks.csv", std::ios::binary);
        if (!out) throw IoError("cannot write ranks.csv under " + dir);
        out << "dataset,metric,method,points\n";
        for (std::size_t d = 0; d < report.datasets.size(); ++d)
            for (std::size_t k = 0; k < metric_names().size(); ++k)
                for (std::size_t m = 0; m < report.methods.size(); ++m)
                    out << report.datasets[d] << "," << metric_names()[k] << ","
                        << report.methods[m] << ","
                        << detail::format_double(report.ranks.points[d][k][m]) << "\n";
        out << "\nmetric,method,average_points\n";
        for (std::size_t k = 0; k < metric_names().size(); ++k)
            for (std::size_t m = 0; m < report.methods.size(); ++m)
                out << metric_names()[k] << "," << report.methods[m] << ","
                    << detail::format_double(report.ranks.per_metric_average[k][m]) << "\n";
        out << "\nmethod,overall_points\n";
        for (std::size_t m = 0; m < report.methods.size(); ++m)
            out << report.methods[m] << ","
                << detail::format_double(report.ranks.overall[m]) << "\n";
    }
}

// Writes report.json / audit.json and the CSV trio depending on `format`
// ("json", "csv", or "both").
inline void write_report(const RunReport& report, const std::string& dir,
                         const std::string& format) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());

    if (format == "json" || format == "both") {
        std::ofstream out(fs::path(dir) / "report.json", std::ios::binary);
        if (!out) throw IoError("cannot write report.json under " + dir);
        out << report_to_json(report).dump(2) << "\n";
        std::ofstream audit(fs::path(dir) / "audit.json", std::ios::binary);
        if (!audit) throw IoError("cannot write audit.json under " + dir);
        audit << audit_to_json(report).dump(2) << "\n";
    }
    if (format == "csv" || format == "both") write_report_csv(report, dir);
}

} // namespace assom
