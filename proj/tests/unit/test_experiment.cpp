#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "assom/experiment.hpp"

using Catch::Approx;

namespace {

assom::ExperimentConfig small_config(const std::vector<std::string>& methods) {
    assom::ExperimentConfig cfg;
    cfg.master_seed = 2024;
    cfg.methods = methods;
    cfg.outer_repetitions = 2;
    cfg.inner_repetitions = 2;
    cfg.knn_k = 3;
    cfg.training.epochs = 6;
    cfg.oversample.subspace_dim = 1;
    cfg.smote.k = 3;

    assom::DatasetSpec spec;
    spec.name = "gauss";
    spec.path = std::string(FIXTURES_DIR) + "/gauss_9to1.csv";
    spec.csv.label_column = std::string("class");
    spec.positive_labels = {"pos"};
    cfg.datasets.push_back(spec);
    return cfg;
}

} // namespace

TEST_CASE("run_compare produces a full, reproducible grid") {
    const auto cfg = small_config({"none", "assom", "smote"});
    const auto report = assom::run_compare(cfg);

    CHECK(report.complete);
    CHECK(report.cells.size() == 3 * 2 * 2); // methods x outer x inner
    for (const auto& cell : report.cells) {
        CHECK_FALSE(cell.error.has_value());
        CHECK(cell.report.counts.total() == 60); // 30% of 200 rows
    }

    SECTION("aggregates are recomputable from the cells") {
        for (std::size_t m = 0; m < report.methods.size(); ++m)
            for (std::size_t k = 0; k < assom::metric_names().size(); ++k) {
                double mean = 0.0;
                std::size_t n = 0;
                for (const auto& cell : report.cells)
                    if (cell.method == m) {
                        mean += assom::metric_by_name(cell.report, assom::metric_names()[k]);
                        ++n;
                    }
                mean /= static_cast<double>(n);
                CHECK(report.aggregates[0][m][k].first == Approx(mean).margin(1e-12));
            }
    }

    SECTION("byte-identical JSON across runs with the same master seed") {
        const auto again = assom::run_compare(cfg);
        CHECK(assom::report_to_json(report).dump(2) == assom::report_to_json(again).dump(2));
        CHECK(assom::audit_to_json(report).dump(2) == assom::audit_to_json(again).dump(2));
    }

    SECTION("a different master seed changes the results") {
        auto other = cfg;
        other.master_seed = 2025;
        const auto different = assom::run_compare(other);
        CHECK(assom::report_to_json(report).dump() != assom::report_to_json(different).dump());
    }

    SECTION("parallel execution matches the sequential report") {
        const auto threaded = assom::run_compare(cfg, 4);
        CHECK(assom::report_to_json(report).dump(2) == assom::report_to_json(threaded).dump(2));
    }
}

TEST_CASE("no fit operation ever consumes a test row") {
    const auto cfg = small_config({"none", "assom", "smote"});
    const auto report = assom::run_compare(cfg);

    // Reconstruct each outer repetition's test-row ids from the same derived
    // seed the runner used.
    assom::RawTable table = assom::load_csv(cfg.datasets[0].path, cfg.datasets[0].csv);
    assom::Dataset full = assom::binarize(table, cfg.datasets[0].positive_labels);

    REQUIRE_FALSE(report.audit.empty());
    for (std::size_t outer = 0; outer < cfg.outer_repetitions; ++outer) {
        assom::SplitSpec spec;
        spec.train_fraction = cfg.train_fraction;
        spec.seed = assom::derive_seed(cfg.master_seed, {0, outer, assom::seed_stream::split});
        const auto [train, test] = assom::stratified_split(full, spec);
        std::set<std::size_t> test_ids(test.row_ids.begin(), test.row_ids.end());
        REQUIRE_FALSE(test_ids.empty());

        for (const auto& entry : report.audit) {
            if (entry.outer != outer) continue;
            for (std::size_t id : entry.row_ids) CHECK(test_ids.count(id) == 0);
        }
    }

    // Every expected fit operation is on record.
    std::set<std::string> ops;
    for (const auto& entry : report.audit) ops.insert(entry.operation);
    CHECK(ops == std::set<std::string>{"zscore_fit", "assom_fit", "smote_fit", "knn_train"});
}

TEST_CASE("method none reduces to a plain train/test evaluation") {
    const auto cfg = small_config({"none"});
    const auto report = assom::run_compare(cfg);

    // Recompute one cell by hand: outer 0, inner 0.
    assom::RawTable table = assom::load_csv(cfg.datasets[0].path, cfg.datasets[0].csv);
    assom::Dataset full = assom::binarize(table, cfg.datasets[0].positive_labels);
    assom::SplitSpec spec;
    spec.train_fraction = cfg.train_fraction;
    spec.seed = assom::derive_seed(cfg.master_seed, {0, 0, assom::seed_stream::split});
    const auto [train, test] = assom::stratified_split(full, spec);
    const auto norm = assom::zscore_fit(train);

    assom::Dataset train_norm = train;
    train_norm.features = assom::zscore_apply(norm, train.features);
    assom::Rng order_rng(
        assom::derive_seed(cfg.master_seed, {0, 0, assom::seed_stream::inner_order, 0}));
    std::vector<std::size_t> order(train_norm.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    order_rng.shuffle(order);
    const assom::Dataset shuffled = assom::detail::take_rows(train_norm, order);

    const auto predicted =
        assom::knn_classify(shuffled, assom::zscore_apply(norm, test.features), cfg.knn_k);
    const auto expected = assom::metrics(assom::confusion(test.labels, predicted));

    const auto& cell = report.cells.front();
    CHECK(cell.outer == 0);
    CHECK(cell.inner == 0);
    CHECK(cell.report.counts.tp == expected.counts.tp);
    CHECK(cell.report.counts.fp == expected.counts.fp);
    CHECK(cell.report.counts.tn == expected.counts.tn);
    CHECK(cell.report.counts.fn == expected.counts.fn);
    CHECK(cell.report.g_mean == Approx(expected.g_mean).margin(1e-15));
}

TEST_CASE("failed cells are marked and the report flagged incomplete") {
    auto cfg = small_config({"none", "smote"});
    cfg.smote.k = 15; // minority train split has 14 rows; smote needs > k
    cfg.smote.amount = 1;

    const auto report = assom::run_compare(cfg);
    CHECK_FALSE(report.complete);
    bool any_error = false, any_ok = false;
    for (const auto& cell : report.cells) {
        if (cell.error) {
            any_error = true;
            CHECK(report.methods[cell.method] == "smote");
        } else {
            any_ok = true;
        }
    }
    CHECK(any_error);
    CHECK(any_ok);
}

TEST_CASE("report files are written in the requested formats") {
    auto cfg = small_config({"none"});
    cfg.outer_repetitions = 1;
    cfg.inner_repetitions = 1;
    const auto report = assom::run_compare(cfg);

    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "assom_report_test";
    fs::remove_all(dir);

    assom::write_report(report, dir.string(), "both");
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "audit.json"));
    CHECK(fs::exists(dir / "cells.csv"));
    CHECK(fs::exists(dir / "aggregates.csv"));
    CHECK(fs::exists(dir / "ranks.csv"));
    fs::remove_all(dir);
}
