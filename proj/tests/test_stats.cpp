#include <doctest.h>

#include <cmath>
#include <random>

#include "fcikit/dataset.hpp"
#include "fcikit/error.hpp"
#include "fcikit/stats.hpp"
#include "oracles.hpp"

using namespace fcikit;

namespace {

Dataset gaussian_data(int n, int p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<double>> cols(p, std::vector<double>(n));
    std::vector<std::string> names;
    for (int c = 0; c < p; ++c) {
        names.push_back("V" + std::to_string(c));
        for (int r = 0; r < n; ++r) cols[c][r] = gauss(rng);
    }
    return Dataset::from_columns(names, cols);
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("single column gives the 1x1 identity") {
    const auto d = Dataset::from_columns({"a"}, {{3.0, -1.0, 7.5}});
    const auto corr = correlation_matrix(d);
    CHECK(corr.dim() == 1);
    CHECK(corr(0, 0) == 1.0);
}

TEST_CASE("affine dependence yields off-diagonal 1") {
    std::vector<double> x{1, 2, 3, 4, 5, 6};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * v + 7.0);
    const auto corr = correlation_matrix(Dataset::from_columns({"a", "b"}, {x, y}));
    CHECK(corr(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(corr(0, 1) == corr(1, 0));
}

TEST_CASE("independent normals correlate near zero at n = 100000") {
    const auto corr = correlation_matrix(gaussian_data(100000, 2, 42));
    CHECK(std::abs(corr(0, 1)) < 0.02);
}

TEST_CASE("constant column and short input are hard errors") {
    CHECK_THROWS_AS(correlation_matrix(
                        Dataset::from_columns({"a", "b"}, {{1, 2, 3}, {5, 5, 5}})),
                    ConstantColumnError);
    CHECK_THROWS_AS(correlation_matrix(Dataset::from_columns({"a"}, {{1.0}})),
                    TooFewRowsError);
    Dataset with_gap = Dataset::from_columns({"a", "b"}, {{1, 2, 3}, {4, 5, 6}});
    with_gap.set_missing(1, 0);
    CHECK_THROWS_AS(correlation_matrix(with_gap), Error);
}

TEST_CASE("serial and parallel kernels are bit-identical") {
    const auto d = gaussian_data(5000, 8, 7);
    const auto a = correlation_matrix(d);
    const auto b = correlation_matrix_serial(d);
    REQUIRE(a.dim() == b.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) CHECK(a(i, j) == b(i, j));
}

TEST_CASE("positive affine transforms leave correlations unchanged within 1e-12") {
    const auto d = gaussian_data(2000, 5, 11);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> scale(0.5, 3.0), shift(-5.0, 5.0);
    std::vector<std::vector<double>> cols;
    for (int c = 0; c < d.cols(); ++c) {
        const double a = scale(rng), b = shift(rng);
        std::vector<double> col(d.column(c), d.column(c) + d.rows());
        for (auto& v : col) v = a * v + b;
        cols.push_back(std::move(col));
    }
    const auto base = correlation_matrix(d);
    const auto scaled =
        correlation_matrix(Dataset::from_columns(d.names(), cols));
    for (int i = 0; i < base.dim(); ++i)
        for (int j = 0; j < base.dim(); ++j)
            CHECK(std::abs(scaled(i, j) - base(i, j)) < 1e-12);
}

TEST_CASE("chain population matrix gives zero partial correlation") {
    // X -> Y -> Z with unit weights and unit noise
    const double rxy = 1.0 / std::sqrt(2.0);
    const double ryz = std::sqrt(2.0) / std::sqrt(3.0);
    const double rxz = 1.0 / std::sqrt(3.0);
    const auto corr = CorrelationMatrix::from_values(
        3, {1, rxy, rxz, rxy, 1, ryz, rxz, ryz, 1});
    CHECK(std::abs(partial_correlation(corr, 0, 2, {1})) < 1e-10);
}

TEST_CASE("collider conditioning induces -0.5") {
    // Z = X + Y + e with X _||_ Y and unit variances everywhere
    const double r = 1.0 / std::sqrt(3.0);
    const auto corr =
        CorrelationMatrix::from_values(3, {1, 0, r, 0, 1, r, r, r, 1});
    CHECK(partial_correlation(corr, 0, 1, {2}) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("empty conditioning set returns the raw entry exactly") {
    std::mt19937_64 rng(3);
    const auto corr = testoracle::random_correlation(5, rng);
    CHECK(partial_correlation(corr, 1, 3, {}) == corr(1, 3));
}

TEST_CASE("collinear submatrix reports singularity") {
    const auto corr = CorrelationMatrix::from_values(
        3, {1, 1, 0.5, 1, 1, 0.5, 0.5, 0.5, 1});
    CHECK_THROWS_AS(partial_correlation(corr, 0, 2, {1}), SingularSubmatrixError);
}

TEST_CASE("precision route matches the recursive formula within 1e-8") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const auto corr = testoracle::random_correlation(6, rng);
        for (const auto& cond : testoracle::conditioning_sets(6, 0, 1, 4)) {
            const double lhs = partial_correlation(corr, 0, 1, cond);
            const double rhs = testoracle::recursive_partial_corr(corr, 0, 1, cond);
            CHECK(std::abs(lhs - rhs) < 1e-8);
        }
    }
}

TEST_CASE("fisher statistic examples") {
    const auto zero = CorrelationMatrix::from_values(2, {1, 0, 0, 1});
    const auto r0 = fisher_z_test(zero, 50, 0, 1, {}, 0.05);
    CHECK(r0.statistic == 0.0);
    CHECK(r0.p_value == 1.0);
    CHECK(r0.independent);
    CHECK(r0.conditioning_size == 0);

    const auto half = CorrelationMatrix::from_values(2, {1, 0.5, 0.5, 1});
    const auto r1 = fisher_z_test(half, 103, 0, 1, {}, 0.05);
    CHECK(r1.statistic ==
          doctest::Approx(10.0 * 0.5 * std::log(3.0)).epsilon(1e-12));
    CHECK(std::abs(r1.statistic - 5.4931) < 1e-3);
    CHECK_FALSE(r1.independent);
}

TEST_CASE("clamp keeps collinear input finite and decisive") {
    const double r = 1.0 - 1e-15;
    const auto corr = CorrelationMatrix::from_values(2, {1, r, r, 1});
    const auto res = fisher_z_test(corr, 100, 0, 1, {}, 0.05);
    CHECK(std::isfinite(res.statistic));
    CHECK_FALSE(res.independent);
}

TEST_CASE("insufficient samples for the requested conditioning size") {
    const auto corr = CorrelationMatrix::from_values(2, {1, 0.3, 0.3, 1});
    CHECK_THROWS_AS(fisher_z_test(corr, 3, 0, 1, {}, 0.05), InsufficientSamplesError);
}

TEST_CASE("test is symmetric in its endpoints") {
    std::mt19937_64 rng(23);
    const auto corr = testoracle::random_correlation(5, rng);
    for (const auto& cond : testoracle::conditioning_sets(5, 0, 3, 3)) {
        const auto a = fisher_z_test(corr, 500, 0, 3, cond, 0.05);
        const auto b = fisher_z_test(corr, 500, 3, 0, cond, 0.05);
        CHECK(a.statistic == b.statistic);
        CHECK(a.p_value == b.p_value);
        CHECK(a.independent == b.independent);
    }
}

TEST_CASE("p-value decreases as |statistic| grows") {
    const int n = 200;
    double last_p = 2.0;
    for (double r = 0.0; r < 0.95; r += 0.05) {
        const auto corr = CorrelationMatrix::from_values(2, {1, r, r, 1});
        const auto res = fisher_z_test(corr, n, 0, 1, {}, 0.05);
        CHECK(res.p_value < last_p + 1e-15);
        last_p = res.p_value;
    }
}

}  // TEST_SUITE
