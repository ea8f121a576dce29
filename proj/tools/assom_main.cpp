// Command-line front end: train ASSOM networks, oversample datasets, run
// method comparisons, and compute metrics from prediction files.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "assom/config.hpp"
#include "assom/dataset.hpp"
#include "assom/errors.hpp"
#include "assom/experiment.hpp"
#include "assom/metrics.hpp"
#include "assom/oversample.hpp"
#include "assom/serialize.hpp"
#include "assom/version.hpp"

namespace {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

LogLevel log_level() {
    const char* env = std::getenv("ASSOM_LOG");
    if (!env) return LogLevel::info;
    const std::string v(env);
    if (v == "quiet" || v == "0") return LogLevel::quiet;
    if (v == "debug" || v == "2") return LogLevel::debug;
    return LogLevel::info;
}

void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::info) std::cerr << "[assom] " << msg << "\n";
}

void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::debug) std::cerr << "[assom:debug] " << msg << "\n";
}

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::size_t jobs = 1;
    std::optional<std::string> format;
};

assom::ExperimentConfig load_config(const CommonArgs& args) {
    assom::ExperimentConfig cfg = assom::load_experiment_config(args.config_path);
    if (args.seed) cfg.master_seed = *args.seed;
    if (args.out_dir) cfg.output_dir = *args.out_dir;
    if (args.format) cfg.format = *args.format;
    cfg.validate();
    log_debug("config loaded from " + args.config_path);
    return cfg;
}

const assom::DatasetSpec& pick_dataset(const assom::ExperimentConfig& cfg,
                                       const std::string& name) {
    if (name.empty()) {
        if (cfg.datasets.empty()) throw assom::ConfigError("config defines no datasets");
        return cfg.datasets.front();
    }
    for (const auto& ds : cfg.datasets)
        if (ds.name == name) return ds;
    throw assom::ConfigError("no dataset named '" + name + "' in config");
}

assom::Dataset load_binary_dataset(const assom::DatasetSpec& spec) {
    assom::RawTable table = assom::load_csv(spec.path, spec.csv);
    assom::Dataset ds = assom::binarize(table, spec.positive_labels);
    ds.name = spec.name;
    return ds;
}

int cmd_train(const CommonArgs& args, const std::string& dataset_name,
              const std::string& output_file) {
    assom::ExperimentConfig cfg = load_config(args);
    const auto& spec = pick_dataset(cfg, dataset_name);
    assom::Dataset ds = load_binary_dataset(spec);
    log_info("loaded " + spec.name + ": " + std::to_string(ds.rows()) + " rows, " +
             std::to_string(ds.dim()) + " features");

    const assom::NormalizationParams norm = assom::zscore_fit(ds);
    const auto normalized = assom::zscore_apply(norm, ds.features);

    std::vector<assom::Vector> minority;
    for (std::size_t i : ds.indices_of(assom::ClassLabel::minority))
        minority.push_back(normalized[i]);
    const std::size_t n_majority = ds.rows() - minority.size();

    assom::OversampleConfig ocfg = cfg.oversample;
    ocfg.training.seed = cfg.master_seed;
    const auto sampler = assom::AssomOversampler::fit(minority, ocfg, n_majority);

    for (std::size_t e = 0; e < sampler.history().cost.size(); ++e)
        std::printf("epoch %zu E %.17g\n", e, sampler.history().cost[e]);

    std::string path = output_file;
    if (path.empty()) {
        std::filesystem::create_directories(cfg.output_dir);
        path = (std::filesystem::path(cfg.output_dir) / (spec.name + "_network.json")).string();
    }
    assom::save_network(sampler.network(), path);
    std::printf("wrote %s (N=%zu, H=%zu, D=%zu)\n", path.c_str(), sampler.network().size(),
                sampler.network().subspace_dim, sampler.network().input_dim);
    return 0;
}

int cmd_oversample(const CommonArgs& args, const std::string& dataset_name,
                   const std::string& input_file, const std::string& output_file,
                   const std::string& provenance_file) {
    assom::ExperimentConfig cfg = load_config(args);
    assom::DatasetSpec spec = pick_dataset(cfg, dataset_name);
    if (!input_file.empty()) spec.path = input_file;
    assom::Dataset ds = load_binary_dataset(spec);

    const std::size_t before_min = ds.count(assom::ClassLabel::minority);
    const std::size_t before_maj = ds.rows() - before_min;

    // Oversample in z-scored space, then write back in the original units.
    const assom::NormalizationParams norm = assom::zscore_fit(ds);
    assom::Dataset normalized = ds;
    normalized.features = assom::zscore_apply(norm, ds.features);

    assom::OversampleConfig ocfg = cfg.oversample;
    ocfg.training.seed = cfg.master_seed;
    assom::OversampleResult result = assom::oversample(normalized, ocfg);

    assom::Dataset augmented = result.augmented;
    augmented.features = assom::zscore_invert(norm, augmented.features);
    // Original rows are written bit-identically to the input, not through the
    // normalization round trip.
    for (std::size_t i = 0; i < ds.rows(); ++i) augmented.features[i] = ds.features[i];

    assom::write_csv(augmented, output_file, spec.csv.delimiter);
    if (!provenance_file.empty()) assom::write_provenance_csv(result.batch, provenance_file);

    const std::size_t after_min = augmented.count(assom::ClassLabel::minority);
    const std::size_t after_maj = augmented.rows() - after_min;
    std::printf("N %zu\n", result.sampler.module_count());
    std::printf("before majority %zu minority %zu\n", before_maj, before_min);
    std::printf("after majority %zu minority %zu\n", after_maj, after_min);
    std::printf("wrote %s (%zu synthetic rows)\n", output_file.c_str(), result.batch.size());
    return 0;
}

int cmd_compare(const CommonArgs& args) {
    assom::ExperimentConfig cfg = load_config(args);
    log_info("comparing methods on " + std::to_string(cfg.datasets.size()) + " dataset(s), " +
             std::to_string(cfg.outer_repetitions) + "x" +
             std::to_string(cfg.inner_repetitions) + " repetitions");
    assom::RunReport report = assom::run_compare(cfg, args.jobs);
    assom::write_report(report, cfg.output_dir, cfg.format);

    for (std::size_t d = 0; d < report.datasets.size(); ++d)
        for (std::size_t m = 0; m < report.methods.size(); ++m) {
            std::printf("%s %s", report.datasets[d].c_str(), report.methods[m].c_str());
            for (std::size_t k = 0; k < assom::metric_names().size(); ++k)
                std::printf(" %s %.4f", assom::metric_names()[k].c_str(),
                            report.aggregates[d][m][k].first);
            std::printf("\n");
        }
    std::printf("report written to %s\n", cfg.output_dir.c_str());
    if (!report.complete)
        throw assom::IncompleteGrid("one or more cells failed; see failure markers in the report");
    return 0;
}

int cmd_metrics(const std::string& input_file, const std::string& positive,
                const std::string& format) {
    // Predictions file: two label columns (y_true, y_pred), header required.
    std::ifstream in(input_file, std::ios::binary);
    if (!in) throw assom::IoError("cannot open: " + input_file);
    std::ostringstream buf;
    buf << in.rdbuf();
    auto records = assom::detail::split_records(buf.str(), ',', input_file);
    if (records.size() < 2) throw assom::ParseError(input_file + ": need a header and data rows");
    if (records.front().size() < 2)
        throw assom::ParseError(input_file + ": need y_true and y_pred columns");

    std::vector<assom::ClassLabel> y_true, y_pred;
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != records.front().size())
            throw assom::RaggedRows(input_file + ": row " + std::to_string(r + 1));
        y_true.push_back(assom::detail::trim(records[r][0]) == positive
                             ? assom::ClassLabel::minority
                             : assom::ClassLabel::majority);
        y_pred.push_back(assom::detail::trim(records[r][1]) == positive
                             ? assom::ClassLabel::minority
                             : assom::ClassLabel::majority);
    }

    const assom::MetricReport report = assom::metrics(assom::confusion(y_true, y_pred));
    if (format == "csv") {
        std::printf("metric,value\n");
        std::printf("tp,%zu\nfp,%zu\ntn,%zu\nfn,%zu\n", report.counts.tp, report.counts.fp,
                    report.counts.tn, report.counts.fn);
        for (const auto& name : assom::metric_names())
            std::printf("%s,%.17g\n", name.c_str(), assom::metric_by_name(report, name));
    } else {
        nlohmann::json j;
        j["counts"] = {{"tp", report.counts.tp},
                       {"fp", report.counts.fp},
                       {"tn", report.counts.tn},
                       {"fn", report.counts.fn}};
        for (const auto& name : assom::metric_names())
            j["metrics"][name] = assom::metric_by_name(report, name);
        std::printf("%s\n", j.dump(2).c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ASSOM subspace learning and minority oversampling"};
    app.set_version_flag("--version", std::string(assom::kArtifactVersion));
    app.require_subcommand(1);

    CommonArgs common;
    std::string dataset_name, input_file, output_file, provenance_file, positive_label;
    std::string metrics_format = "json";

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", common.config_path, "experiment config (TOML)");
        if (needs_config) opt->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", common.seed, "override master seed");
        sub->add_option("--out", common.out_dir, "output directory");
        sub->add_option("--jobs", common.jobs, "worker threads for independent cells");
        sub->add_option("--format", common.format, "report format: json, csv, or both")
            ->check(CLI::IsMember({"json", "csv", "both"}));
    };

    auto* train = app.add_subcommand("train", "train an ASSOM on a dataset's minority class");
    add_common(train, true);
    train->add_option("--dataset", dataset_name, "dataset name from the config (default: first)");
    train->add_option("--output", output_file, "network JSON path (default: <out>/<name>_network.json)");

    auto* oversample = app.add_subcommand("oversample", "augment a dataset's minority class");
    add_common(oversample, true);
    oversample->add_option("--dataset", dataset_name, "dataset name from the config (default: first)");
    oversample->add_option("--input", input_file, "override the dataset's CSV path")
        ->check(CLI::ExistingFile);
    oversample->add_option("--output", output_file, "augmented CSV path")->required();
    oversample->add_option("--provenance", provenance_file, "sidecar provenance CSV path");

    auto* compare = app.add_subcommand("compare", "run the method-comparison protocol");
    add_common(compare, true);

    auto* metrics = app.add_subcommand("metrics", "compute metrics from a predictions CSV");
    metrics->add_option("--input", input_file, "CSV with y_true,y_pred label columns")
        ->required()
        ->check(CLI::ExistingFile);
    metrics->add_option("--positive", positive_label, "label string of the positive (minority) class")
        ->required();
    metrics->add_option("--format", metrics_format, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (train->parsed()) return cmd_train(common, dataset_name, output_file);
        if (oversample->parsed())
            return cmd_oversample(common, dataset_name, input_file, output_file, provenance_file);
        if (compare->parsed()) return cmd_compare(common);
        if (metrics->parsed()) return cmd_metrics(input_file, positive_label, metrics_format);
    } catch (const assom::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const assom::IoError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const assom::ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const assom::RaggedRows& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const assom::NotMinority& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const assom::UnknownLabel& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const assom::TooSmall& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const assom::EmptyClass& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const assom::InsufficientData& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const assom::InsufficientVariance& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const assom::TooFewMinority& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const assom::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
