#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "assom/oversample.hpp"

#include "../support/oracles.hpp"

using assom::AssomOversampler;
using assom::BasisSet;
using assom::ClassLabel;
using assom::Dataset;
using assom::OversampleConfig;
using assom::Vector;
using Catch::Approx;

namespace {

assom::AssomNetwork single_module_network(std::vector<Vector> basis) {
    assom::AssomNetwork net;
    net.input_dim = basis.front().size();
    net.subspace_dim = basis.size();
    assom::AssomModule m;
    m.index = 0;
    m.basis = BasisSet::from_orthonormal(std::move(basis));
    m.prev_basis = m.basis;
    net.modules.push_back(std::move(m));
    return net;
}

Dataset make_dataset(std::vector<Vector> features, std::vector<int> minority_flags) {
    Dataset ds;
    ds.name = "synthetic";
    ds.feature_names.resize(features.front().size());
    for (std::size_t c = 0; c < ds.feature_names.size(); ++c)
        ds.feature_names[c] = "f" + std::to_string(c);
    ds.minority_name = "pos";
    for (std::size_t i = 0; i < features.size(); ++i) {
        ds.features.push_back(std::move(features[i]));
        ds.labels.push_back(minority_flags[i] ? ClassLabel::minority : ClassLabel::majority);
        ds.raw_labels.push_back(minority_flags[i] ? "pos" : "neg");
        ds.row_ids.push_back(i);
    }
    return ds;
}

OversampleConfig quick_config(std::size_t h = 1, std::size_t epochs = 15) {
    OversampleConfig cfg;
    cfg.subspace_dim = h;
    cfg.training.epochs = epochs;
    cfg.training.seed = 99;
    return cfg;
}

} // namespace

TEST_CASE("compute_module_count follows round(ratio) - 1 with a floor of 1") {
    CHECK(assom::compute_module_count(950, 50) == 18);
    CHECK(assom::compute_module_count(100, 100) == 1);
    CHECK(assom::compute_module_count(500, 268) == 1); // Pima-style counts
    CHECK(assom::compute_module_count(900, 100) == 8);
    CHECK(assom::compute_module_count(250, 100) == 2); // round(2.5) = 3, half away from zero
    CHECK(assom::compute_module_count(140, 100) == 1); // round(1.4) - 1 = 0 -> floor
    CHECK(assom::compute_module_count(1, 1) == 1);
    CHECK_THROWS_AS(assom::compute_module_count(10, 0), assom::EmptyClass);
}

TEST_CASE("fit fails fast on degenerate minority data") {
    OversampleConfig cfg = quick_config();
    const std::vector<Vector> constant(5, Vector{1.5, -2.0});
    CHECK_THROWS_AS(AssomOversampler::fit(constant, cfg, 50), assom::InsufficientVariance);

    cfg.subspace_dim = 2;
    const std::vector<Vector> two = {{1, 0}, {0, 1}}; // fewer than H+1 = 3
    CHECK_THROWS_AS(AssomOversampler::fit(two, cfg, 50), assom::InsufficientData);

    cfg.subspace_dim = 3;
    const std::vector<Vector> flat = {{1, 0}, {0, 1}, {1, 1}, {2, 1}};
    CHECK_THROWS_AS(AssomOversampler::fit(flat, cfg, 50), assom::ConfigError); // H > D
}

TEST_CASE("fit is deterministic for fixed data and seeds") {
    assom::Rng rng(31);
    std::vector<Vector> minority;
    for (int i = 0; i < 20; ++i) minority.push_back(oracle::random_vector(rng, 3));
    const OversampleConfig cfg = quick_config(1);

    const auto a = AssomOversampler::fit(minority, cfg, 100);
    const auto b = AssomOversampler::fit(minority, cfg, 100);
    CHECK(a.mean() == b.mean());
    REQUIRE(a.network().size() == b.network().size());
    for (std::size_t n = 0; n < a.network().size(); ++n)
        CHECK(a.network().modules[n].basis.vectors() == b.network().modules[n].basis.vectors());
}

TEST_CASE("fit aligns modules with two minority lines through the mean") {
    // Two clusters on distinct 1-D lines through their common mean.
    assom::Rng rng(32);
    std::vector<Vector> minority;
    std::vector<int> labels;
    for (int i = 0; i < 60; ++i) {
        const int label = i % 2;
        const double c = (0.4 + rng.next_double()) * (rng.next_double() < 0.5 ? -1 : 1);
        Vector x(4, 0.0);
        x[label == 0 ? 0 : 2] = c;
        x[label == 0 ? 1 : 3] = 0.15 * c;
        minority.push_back(std::move(x));
        labels.push_back(label);
    }

    OversampleConfig cfg = quick_config(1, 40);
    cfg.module_count_override = 2;
    cfg.training.sigma = 0.3;
    const auto sampler = AssomOversampler::fit(minority, cfg, 600);

    std::size_t counts[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t i = 0; i < minority.size(); ++i) {
        assom::Episode ep;
        ep.samples = {assom::subtract(minority[i], sampler.mean())};
        counts[assom::find_winner(sampler.network(), ep)][static_cast<std::size_t>(labels[i])]++;
    }
    for (int m = 0; m < 2; ++m) {
        const std::size_t total = counts[m][0] + counts[m][1];
        REQUIRE(total > 0);
        CHECK(static_cast<double>(std::max(counts[m][0], counts[m][1])) /
                  static_cast<double>(total) >=
              0.9);
    }
}

TEST_CASE("generate_for_sample reconstructs through each subspace") {
    const auto sampler =
        AssomOversampler::from_parts({0, 0}, single_module_network({{1, 0}}));

    SECTION("worked example") {
        const auto batch = sampler.generate_for_sample({3, 4});
        REQUIRE(batch.size() == 1);
        CHECK(batch.samples[0] == Vector{3, 0});
        CHECK(batch.provenance[0].reconstruction_error == Approx(4.0));
        CHECK(batch.provenance[0].module_index == 0);
    }
    SECTION("in-span input is a fixed point with zero error") {
        const auto batch = sampler.generate_for_sample({2.5, 0});
        CHECK(batch.samples[0][0] == Approx(2.5).margin(1e-10));
        CHECK(batch.samples[0][1] == Approx(0.0).margin(1e-10));
        CHECK(batch.provenance[0].reconstruction_error == Approx(0.0).margin(1e-10));
    }
}

TEST_CASE("generated samples are idempotent under their module's projection") {
    assom::Rng rng(33);
    std::vector<Vector> minority;
    for (int i = 0; i < 25; ++i) minority.push_back(oracle::random_vector(rng, 5));
    OversampleConfig cfg = quick_config(2);
    cfg.module_count_override = 3;
    const auto sampler = AssomOversampler::fit(minority, cfg, 250);

    for (int rep = 0; rep < 10; ++rep) {
        const Vector x = oracle::random_vector(rng, 5);
        const auto batch = sampler.generate_for_sample(x);
        REQUIRE(batch.size() == 3);
        for (std::size_t i = 0; i < batch.size(); ++i) {
            const auto& module = sampler.network().modules[batch.provenance[i].module_index];
            const Vector centered = assom::subtract(batch.samples[i], sampler.mean());
            const Vector again = assom::project(module.basis, centered);
            for (std::size_t j = 0; j < 5; ++j)
                CHECK(again[j] == Approx(centered[j]).margin(1e-10));
        }
    }
}

TEST_CASE("oversample count, label, membership, and determinism laws") {
    assom::Rng rng(34);
    std::vector<Vector> features;
    std::vector<int> flags;
    for (int i = 0; i < 90; ++i) { // majority scattered
        features.push_back(oracle::random_vector(rng, 3));
        flags.push_back(0);
    }
    for (int i = 0; i < 10; ++i) { // minority on a noisy line
        Vector x = {0.5 * i, 0.25 * i, 0.1};
        for (auto& e : x) e += 0.05 * rng.next_symmetric();
        features.push_back(std::move(x));
        flags.push_back(1);
    }
    const Dataset ds = make_dataset(std::move(features), std::move(flags));

    OversampleConfig cfg = quick_config(1, 25);
    cfg.balance_trim = false;

    const auto result = assom::oversample(ds, cfg);
    const std::size_t n = result.sampler.module_count();
    CHECK(n == 8); // round(90/10) - 1

    SECTION("count law under keep_all") {
        CHECK(result.batch.size() == n * 10);
        CHECK(result.augmented.count(ClassLabel::minority) == 10 + n * 10);
    }
    SECTION("original rows stay first and verbatim") {
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            CHECK(result.augmented.features[i] == ds.features[i]);
            CHECK(result.augmented.labels[i] == ds.labels[i]);
            CHECK(result.augmented.row_ids[i] == ds.row_ids[i]);
        }
    }
    SECTION("membership law and provenance error consistency") {
        for (std::size_t i = 0; i < result.batch.size(); ++i) {
            const auto& prov = result.batch.provenance[i];
            const auto& module = result.sampler.network().modules[prov.module_index];
            const Vector centered =
                assom::subtract(result.batch.samples[i], result.sampler.mean());
            CHECK(assom::norm(assom::residual(module.basis, centered)) < 1e-9);

            const Vector source_centered =
                assom::subtract(ds.features[prov.source_row_index], result.sampler.mean());
            CHECK(prov.reconstruction_error ==
                  Approx(assom::norm(assom::residual(module.basis, source_centered)))
                      .margin(1e-10));
        }
    }
    SECTION("synthetic rows all carry the minority label") {
        for (std::size_t i = ds.rows(); i < result.augmented.rows(); ++i) {
            CHECK(result.augmented.labels[i] == ClassLabel::minority);
            CHECK(result.augmented.raw_labels[i] == "pos");
            CHECK(result.augmented.row_ids[i] >= assom::kSyntheticIdBase);
        }
    }
    SECTION("identical config and dataset give identical output") {
        const auto again = assom::oversample(ds, cfg);
        CHECK(again.augmented.features == result.augmented.features);
        CHECK(again.augmented.labels == result.augmented.labels);
    }
}

TEST_CASE("balance_trim equalizes the class counts") {
    assom::Rng rng(35);
    std::vector<Vector> features;
    std::vector<int> flags;
    for (int i = 0; i < 90; ++i) {
        features.push_back(oracle::random_vector(rng, 3));
        flags.push_back(0);
    }
    for (int i = 0; i < 10; ++i) {
        features.push_back(oracle::random_vector(rng, 3));
        flags.push_back(1);
    }
    const Dataset ds = make_dataset(std::move(features), std::move(flags));

    OversampleConfig cfg = quick_config(1, 20);
    cfg.balance_trim = true;
    const auto result = assom::oversample(ds, cfg);
    CHECK(result.augmented.count(ClassLabel::minority) ==
          result.augmented.count(ClassLabel::majority));
    CHECK(result.batch.size() == 80);
}

TEST_CASE("top_k keeps the lowest reconstruction errors per source sample") {
    assom::Rng rng(36);
    std::vector<Vector> features;
    std::vector<int> flags;
    for (int i = 0; i < 60; ++i) {
        features.push_back(oracle::random_vector(rng, 4));
        flags.push_back(0);
    }
    for (int i = 0; i < 12; ++i) {
        features.push_back(oracle::random_vector(rng, 4));
        flags.push_back(1);
    }
    const Dataset ds = make_dataset(std::move(features), std::move(flags));

    OversampleConfig cfg = quick_config(1, 20);
    cfg.balance_trim = false;
    cfg.module_count_override = 4;
    cfg.selection = assom::SelectionMode::top(2);

    const auto result = assom::oversample(ds, cfg);
    CHECK(result.batch.size() == 2 * 12);

    // Reconstruct the full error list per source and compare.
    for (std::size_t s = 0; s < 12; ++s) {
        const std::size_t row = 60 + s;
        const auto full = result.sampler.generate_for_sample(ds.features[row], row);
        std::vector<double> errors;
        for (const auto& p : full.provenance) errors.push_back(p.reconstruction_error);
        std::vector<double> kept;
        for (const auto& p : result.batch.provenance)
            if (p.source_row_index == row) kept.push_back(p.reconstruction_error);
        REQUIRE(kept.size() == 2);
        std::sort(errors.begin(), errors.end());
        const double cutoff = errors[1];
        for (double e : kept) CHECK(e <= cutoff + 1e-15);
    }

    OversampleConfig bad = cfg;
    bad.selection = assom::SelectionMode::top(9); // > N
    CHECK_THROWS_AS(assom::oversample(ds, bad), assom::ConfigError);
}

TEST_CASE("synthetic samples stay near the minority distribution") {
    // Two isotropic Gaussians at ratio 9:1; nearest-centroid in Mahalanobis
    // distance of the generators must prefer the minority for >= 95% of the
    // synthetic points.
    assom::Rng rng(37);
    const double maj_sd = 1.0, min_sd = 0.8;
    const Vector maj_mean = {0, 0, 0, 0};
    const Vector min_mean = {3.0, 3.0, 3.0, 3.0};
    std::vector<Vector> features;
    std::vector<int> flags;
    for (int i = 0; i < 450; ++i) {
        Vector x(4);
        for (std::size_t c = 0; c < 4; ++c) x[c] = maj_mean[c] + maj_sd * oracle::gaussian(rng);
        features.push_back(std::move(x));
        flags.push_back(0);
    }
    for (int i = 0; i < 50; ++i) {
        Vector x(4);
        for (std::size_t c = 0; c < 4; ++c) x[c] = min_mean[c] + min_sd * oracle::gaussian(rng);
        features.push_back(std::move(x));
        flags.push_back(1);
    }
    const Dataset ds = make_dataset(std::move(features), std::move(flags));

    OversampleConfig cfg = quick_config(2, 30);
    const auto result = assom::oversample(ds, cfg);
    REQUIRE(result.batch.size() > 0);

    std::size_t near_minority = 0;
    for (const auto& s : result.batch.samples) {
        const double d_min = std::sqrt(assom::squared_distance(s, min_mean)) / min_sd;
        const double d_maj = std::sqrt(assom::squared_distance(s, maj_mean)) / maj_sd;
        if (d_min < d_maj) ++near_minority;
    }
    CHECK(static_cast<double>(near_minority) >=
          0.95 * static_cast<double>(result.batch.size()));
}
