#include <catch2/catch_amalgamated.hpp>

#include "assom/subspace.hpp"

#include "../support/oracles.hpp"

using assom::BasisSet;
using assom::Vector;
using Catch::Approx;

TEST_CASE("gram_schmidt leaves an orthonormal pair untouched") {
    const auto basis = assom::gram_schmidt({{1, 0}, {0, 1}});
    REQUIRE(basis.subspace_dim() == 2);
    CHECK(basis.vector(0) == Vector{1, 0});
    CHECK(basis.vector(1) == Vector{0, 1});
}

TEST_CASE("gram_schmidt removes the shared component and normalizes") {
    const auto basis = assom::gram_schmidt({{3, 0}, {1, 1}});
    CHECK(basis.vector(0)[0] == Approx(1.0));
    CHECK(basis.vector(0)[1] == Approx(0.0));
    CHECK(basis.vector(1)[0] == Approx(0.0).margin(1e-15));
    CHECK(basis.vector(1)[1] == Approx(1.0));
}

TEST_CASE("gram_schmidt output matches a QR oracle on span and orthonormality") {
    const std::vector<Vector> input = {{1, 1, 0}, {1, 0, 0}, {1, 1, 1}};
    const auto basis = assom::gram_schmidt(input);
    CHECK(basis.max_orthonormality_deviation() < 1e-10);

    // Same span <=> same orthogonal projector.
    const auto p_lib = assom::projector_matrix(basis);
    const auto p_oracle = oracle::projector_of(oracle::qr_basis(input));
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c)
            CHECK(p_lib.at(r, c) == Approx(p_oracle(static_cast<Eigen::Index>(r),
                                                    static_cast<Eigen::Index>(c)))
                                        .margin(1e-12));
}

TEST_CASE("gram_schmidt rejects linearly dependent input") {
    CHECK_THROWS_AS(assom::gram_schmidt({{1, 2}, {2, 4}}), assom::DegenerateBasis);
    CHECK_THROWS_AS(assom::gram_schmidt({{1, 0}, {0, 1}, {1, 1}}), assom::DegenerateBasis);
    CHECK_THROWS_AS(assom::gram_schmidt({}), assom::DegenerateBasis);
}

TEST_CASE("project onto a single axis") {
    const auto basis = BasisSet::from_orthonormal({{1, 0}});
    CHECK(assom::project(basis, {3, 4}) == Vector{3, 0});
    CHECK(assom::residual(basis, {3, 4}) == Vector{0, 4});
}

TEST_CASE("projecting with a full basis is the identity") {
    assom::Rng rng(11);
    const auto basis = assom::gram_schmidt(
        {oracle::random_vector(rng, 4), oracle::random_vector(rng, 4),
         oracle::random_vector(rng, 4), oracle::random_vector(rng, 4)});
    const Vector x = oracle::random_vector(rng, 4);
    const Vector xhat = assom::project(basis, x);
    for (std::size_t i = 0; i < 4; ++i) CHECK(xhat[i] == Approx(x[i]).margin(1e-12));
}

TEST_CASE("project agrees with the explicit projector matrix") {
    assom::Rng rng(12);
    for (int rep = 0; rep < 20; ++rep) {
        const auto basis = assom::gram_schmidt({oracle::random_vector(rng, 6),
                                                oracle::random_vector(rng, 6),
                                                oracle::random_vector(rng, 6)});
        const Vector x = oracle::random_vector(rng, 6);
        const Vector via_sum = assom::project(basis, x);
        const Vector via_matrix = assom::projector_matrix(basis).apply(x);
        for (std::size_t i = 0; i < 6; ++i)
            CHECK(via_sum[i] == Approx(via_matrix[i]).margin(1e-12));
    }
}

TEST_CASE("residual of an in-span vector is zero") {
    const auto basis = assom::gram_schmidt({{1, 1, 0}, {0, 0, 1}});
    const Vector x = {2, 2, -3}; // 2*(1,1,0)+(-3)*(0,0,1) lies in the span
    for (double e : assom::residual(basis, x)) CHECK(e == Approx(0.0).margin(1e-12));
}

TEST_CASE("projector of a single axis and of a full basis") {
    const auto p = assom::projector_matrix(BasisSet::from_orthonormal({{1, 0}}));
    CHECK(p.at(0, 0) == 1.0);
    CHECK(p.at(0, 1) == 0.0);
    CHECK(p.at(1, 0) == 0.0);
    CHECK(p.at(1, 1) == 0.0);

    const auto full = assom::projector_matrix(BasisSet::from_orthonormal({{1, 0}, {0, 1}}));
    CHECK(full.at(0, 0) == Approx(1.0));
    CHECK(full.at(1, 1) == Approx(1.0));
    CHECK(full.at(0, 1) == Approx(0.0).margin(1e-15));
}

TEST_CASE("projector trace equals the subspace dimension") {
    assom::Rng rng(13);
    const auto basis =
        assom::gram_schmidt({oracle::random_vector(rng, 4), oracle::random_vector(rng, 4)});
    const auto p = assom::projector_matrix(basis);
    double trace = 0.0;
    for (std::size_t i = 0; i < 4; ++i) trace += p.at(i, i);
    CHECK(trace == Approx(2.0).margin(1e-10));
}

TEST_CASE("projection properties hold on random bases") {
    assom::Rng rng(14);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t dim = 2 + rng.next_below(7);
        const std::size_t h = 1 + rng.next_below(dim);
        std::vector<Vector> raw;
        for (std::size_t i = 0; i < h; ++i) raw.push_back(oracle::random_vector(rng, dim));
        BasisSet basis;
        try {
            basis = assom::gram_schmidt(raw);
        } catch (const assom::DegenerateBasis&) {
            continue; // astronomically unlikely, but not this test's concern
        }
        const Vector x = oracle::random_vector(rng, dim);
        const Vector xhat = assom::project(basis, x);
        const Vector xres = assom::residual(basis, x);

        // idempotence
        const Vector twice = assom::project(basis, xhat);
        for (std::size_t i = 0; i < dim; ++i) CHECK(twice[i] == Approx(xhat[i]).margin(1e-10));
        // orthogonality of the split
        CHECK(assom::dot(xhat, xres) == Approx(0.0).margin(1e-10));
        // Pythagoras
        CHECK(assom::squared_norm(xhat) + assom::squared_norm(xres) ==
              Approx(assom::squared_norm(x)).margin(1e-10));
        // projector is exactly symmetric and idempotent within tolerance
        const auto p = assom::projector_matrix(basis);
        for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t c = 0; c < dim; ++c) {
                CHECK(p.at(r, c) == p.at(c, r));
                double pp = 0.0;
                for (std::size_t k = 0; k < dim; ++k) pp += p.at(r, k) * p.at(k, c);
                CHECK(pp == Approx(p.at(r, c)).margin(1e-10));
            }
    }
}

TEST_CASE("projection is invariant under in-subspace basis rotation") {
    assom::Rng rng(15);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t dim = 5;
        const std::size_t h = 3;
        std::vector<Vector> raw;
        for (std::size_t i = 0; i < h; ++i) raw.push_back(oracle::random_vector(rng, dim));
        const auto basis = assom::gram_schmidt(raw);

        // Random H x H orthogonal mix of the basis vectors spans the same
        // subspace with a different orthonormal frame.
        std::vector<Vector> mix_rows;
        for (std::size_t i = 0; i < h; ++i) mix_rows.push_back(oracle::random_vector(rng, h));
        const Eigen::MatrixXd q = oracle::qr_basis(mix_rows); // h x h orthogonal
        std::vector<Vector> rotated(h, Vector(dim, 0.0));
        for (std::size_t i = 0; i < h; ++i)
            for (std::size_t j = 0; j < h; ++j)
                assom::axpy(q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)),
                            basis.vector(j), rotated[i]);
        const auto basis2 = BasisSet::from_orthonormal(rotated, 1e-9);

        const Vector x = oracle::random_vector(rng, dim);
        const Vector a = assom::project(basis, x);
        const Vector b = assom::project(basis2, x);
        for (std::size_t i = 0; i < dim; ++i) CHECK(a[i] == Approx(b[i]).margin(1e-8));
    }
}

TEST_CASE("dimension mismatches are rejected") {
    const auto basis = BasisSet::from_orthonormal({{1, 0}});
    CHECK_THROWS_AS(assom::project(basis, {1, 2, 3}), assom::DimensionMismatch);
    CHECK_THROWS_AS(assom::residual(basis, {1}), assom::DimensionMismatch);
}

TEST_CASE("from_orthonormal validates its input") {
    CHECK_THROWS_AS(BasisSet::from_orthonormal({{1, 1}}), assom::DegenerateBasis);
    CHECK_THROWS_AS(BasisSet::from_orthonormal({{1, 0}, {1, 0}}), assom::DegenerateBasis);
}
