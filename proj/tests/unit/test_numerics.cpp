#include "pusc/errors.hpp"
#include "pusc/numerics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

using namespace pusc;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix m(r, c);
    for (double& v : m.data()) v = u(gen);
    return m;
}

Matrix naive_product(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            out(i, j) = s;
        }
    return out;
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

} // namespace

TEST(Matrix, IdentityTimesColumn) {
    const auto id = Matrix::from_rows({{1, 0}, {0, 1}});
    const auto col = Matrix::from_rows({{3}, {4}});
    EXPECT_EQ(matmul(id, col), col);
}

TEST(Matrix, RowTimesColumn) {
    const auto p = matmul(Matrix::from_rows({{1, 2}}), Matrix::from_rows({{3}, {4}}));
    ASSERT_EQ(p.rows(), 1u);
    ASSERT_EQ(p.cols(), 1u);
    EXPECT_DOUBLE_EQ(p(0, 0), 11.0);
}

TEST(Matrix, MatchesTripleLoop) {
    std::mt19937_64 gen(5);
    const auto a = random_matrix(5, 7, gen);
    const auto b = random_matrix(7, 3, gen);
    const auto got = matmul(a, b);
    const auto want = naive_product(a, b);
    for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_NEAR(got.data()[i], want.data()[i], 1e-12);
    }
}

TEST(Matrix, TransposedVariantsMatchExplicitTranspose) {
    std::mt19937_64 gen(9);
    const auto a = random_matrix(4, 6, gen);
    const auto b = random_matrix(5, 6, gen);
    const auto c = random_matrix(4, 3, gen);
    const auto abt = matmul_transposed(a, b);
    const auto abt_ref = naive_product(a, b.transposed());
    for (std::size_t i = 0; i < abt.size(); ++i) EXPECT_NEAR(abt.data()[i], abt_ref.data()[i], 1e-12);
    const auto atc = transposed_matmul(a, c);
    const auto atc_ref = naive_product(a.transposed(), c);
    for (std::size_t i = 0; i < atc.size(); ++i) EXPECT_NEAR(atc.data()[i], atc_ref.data()[i], 1e-12);
}

TEST(Matrix, Associativity) {
    std::mt19937_64 gen(11);
    for (int t = 0; t < 10; ++t) {
        const auto a = random_matrix(3 + t % 3, 4, gen);
        const auto b = random_matrix(4, 5, gen);
        const auto c = random_matrix(5, 2, gen);
        const auto l = matmul(matmul(a, b), c);
        const auto r = matmul(a, matmul(b, c));
        for (std::size_t i = 0; i < l.size(); ++i) {
            EXPECT_LE(std::abs(l.data()[i] - r.data()[i]),
                      1e-9 * std::max(1.0, std::abs(r.data()[i])));
        }
    }
}

TEST(Matrix, ShapeMismatchThrows) {
    EXPECT_THROW(matmul(Matrix(2, 3), Matrix(2, 3)), ShapeError);
    EXPECT_THROW(matmul_transposed(Matrix(2, 3), Matrix(2, 2)), ShapeError);
    EXPECT_THROW(transposed_matmul(Matrix(2, 3), Matrix(3, 2)), ShapeError);
    EXPECT_THROW(Matrix::from_rows({{1, 2}, {3}}), ShapeError);
    EXPECT_THROW(Matrix(2, 2, std::vector<double>{1, 2, 3}), ShapeError);
}

TEST(Matrix, RejectsNonFinite) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_THROW(Matrix::from_rows({{1, nan}}), NumericError);
    EXPECT_THROW(Matrix(1, 1, std::vector<double>{inf}), NumericError);
    EXPECT_THROW(Matrix(1, 1, nan), NumericError);
}

TEST(Matrix, SelectRowsKeepsOrderAndRepeats) {
    const auto m = Matrix::from_rows({{1, 2}, {3, 4}, {5, 6}});
    const std::vector<std::size_t> idx{2, 0, 2};
    EXPECT_EQ(m.select_rows(idx), Matrix::from_rows({{5, 6}, {1, 2}, {5, 6}}));
    const std::vector<std::size_t> bad{3};
    EXPECT_THROW(m.select_rows(bad), ShapeError);
}

TEST(SplitMix64, ReferenceStream) {
    // Published reference outputs for seed 1234567.
    std::uint64_t state = 1234567;
    const std::uint64_t want[] = {6457827717110365317ULL, 3203168211198807973ULL,
                                  9817491932198370423ULL, 4593380528125082431ULL,
                                  16408922859458223821ULL};
    for (std::uint64_t w : want) EXPECT_EQ(splitmix64(state), w);
}

TEST(Rng, GoldenStream) {
    // xoshiro256** seeded by four SplitMix64 steps from 42; values from an
    // independent reference implementation.
    Rng rng(42);
    const std::uint64_t want[] = {1546998764402558742ULL, 6990951692964543102ULL,
                                  12544586762248559009ULL, 17057574109182124193ULL,
                                  18295552978065317476ULL};
    for (std::uint64_t w : want) EXPECT_EQ(rng.next_u64(), w);
}

TEST(Rng, GoldenUniforms) {
    Rng rng(42);
    EXPECT_DOUBLE_EQ(rng.uniform(), 0.08386297105988216);
    EXPECT_DOUBLE_EQ(rng.uniform(), 0.3789802506626686);
    EXPECT_DOUBLE_EQ(rng.uniform(), 0.6800434110281394);
}

TEST(Rng, UniformEmptyAndDeterministic) {
    Rng a(3);
    EXPECT_TRUE(rng_uniform(a, 0).empty());
    Rng r1(77), r2(77);
    const auto x1 = rng_uniform(r1, 10), y1 = rng_uniform(r1, 10);
    const auto x2 = rng_uniform(r2, 10), y2 = rng_uniform(r2, 10);
    EXPECT_NE(x1, y1);
    EXPECT_EQ(x1, x2);
    EXPECT_EQ(y1, y2);
    for (double v : x1) {
        EXPECT_GE(v, 0.0);
        EXPECT_LT(v, 1.0);
    }
}

TEST(Rng, UniformMeanWithinClt) {
    Rng rng(123);
    const std::size_t n = 100000;
    const auto v = rng_uniform(rng, n);
    EXPECT_LT(std::abs(mean(v) - 0.5), 3.0 * (1.0 / std::sqrt(12.0)) / std::sqrt(double(n)));
}

TEST(Rng, NormalMoments) {
    Rng rng(321);
    const std::size_t n = 100000;
    EXPECT_TRUE(rng_normal(rng, 0, 0.0, 1.0).empty());
    const auto z = rng_normal(rng, n, 0.0, 1.0);
    EXPECT_LT(std::abs(mean(z)), 3.0 / std::sqrt(double(n)));
    const auto w = rng_normal(rng, n, 2.0, 1.0);
    const double m = mean(w);
    double ss = 0.0;
    for (double v : w) ss += (v - m) * (v - m);
    EXPECT_LT(std::abs(ss / double(n - 1) - 1.0), 0.05);
}

TEST(Rng, NormalRejectsBadSd) {
    Rng rng(1);
    EXPECT_THROW(rng_normal(rng, 3, 0.0, 0.0), ParameterError);
    EXPECT_THROW(rng_normal(rng, 3, 0.0, -1.0), ParameterError);
}

TEST(Rng, ChildrenAreDistinctAndReproducible) {
    const Rng parent(99);
    Rng c0 = parent.child(0), c1 = parent.child(1), c0b = parent.child(0);
    Rng p = parent;
    const auto s0 = c0.next_u64(), s1 = c1.next_u64();
    EXPECT_NE(s0, s1);
    EXPECT_NE(s0, p.next_u64());
    EXPECT_EQ(s0, c0b.next_u64());
}

TEST(Rng, BelowAndPermutation) {
    Rng rng(8);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) ++counts[rng.below(7)];
    for (int c : counts) EXPECT_NEAR(c, 10000, 4 * std::sqrt(10000.0 * 6 / 7));
    const auto perm = rng.permutation(50);
    std::set<std::size_t> seen(perm.begin(), perm.end());
    EXPECT_EQ(seen.size(), 50u);
    EXPECT_EQ(*seen.rbegin(), 49u);
}
