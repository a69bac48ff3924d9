#include "pusc/csv.hpp"
#include "pusc/errors.hpp"
#include "pusc/metrics.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace pusc;

TEST(Confusion, Counts) {
    const std::vector<int> a{1, 1, -1, -1, 1};
    const auto perfect = confusion(a, a);
    EXPECT_EQ(perfect.fp, 0u);
    EXPECT_EQ(perfect.fn, 0u);
    EXPECT_EQ(perfect.tp, 3u);
    std::vector<int> pred(10, 1), act(10, -1);
    for (int i = 0; i < 5; ++i) act[i] = 1;
    const auto c = confusion(pred, act);
    EXPECT_EQ(c.tp, 5u);
    EXPECT_EQ(c.fp, 5u);
    EXPECT_THROW(confusion(pred, a), ShapeError);
}

TEST(Confusion, RandomCountsSumToN) {
    std::mt19937_64 gen(1);
    std::bernoulli_distribution b(0.4);
    std::vector<int> p(500), y(500);
    for (std::size_t i = 0; i < 500; ++i) {
        p[i] = b(gen) ? 1 : -1;
        y[i] = b(gen) ? 1 : -1;
    }
    const auto c = confusion(p, y);
    EXPECT_EQ(c.total(), 500u);
    std::size_t tp = 0;
    for (std::size_t i = 0; i < 500; ++i) tp += p[i] == 1 && y[i] == 1;
    EXPECT_EQ(c.tp, tp);
}

TEST(Scores, HandCounts) {
    const auto s = scores({8, 2, 8, 2});
    EXPECT_DOUBLE_EQ(s.precision, 80.0);
    EXPECT_DOUBLE_EQ(s.recall, 80.0);
    EXPECT_DOUBLE_EQ(s.f1, 80.0);
    EXPECT_DOUBLE_EQ(s.accuracy, 80.0);
}

TEST(Scores, ZeroDenominators) {
    const auto s = scores({0, 0, 10, 5});
    EXPECT_EQ(csv::format_fixed(s.precision, 2), "0.00");
    EXPECT_EQ(s.recall, 0.0);
    EXPECT_EQ(s.f1, 0.0);
    EXPECT_DOUBLE_EQ(s.accuracy, 10.0 / 15.0 * 100.0);
    const auto e = scores({0, 0, 0, 0});
    EXPECT_EQ(e.accuracy, 0.0);
}

TEST(Scores, F1IsHarmonicMean) {
    std::mt19937_64 gen(2);
    std::uniform_int_distribution<std::size_t> u(1, 500);
    for (int i = 0; i < 200; ++i) {
        const ConfusionCounts c{u(gen), u(gen), u(gen), u(gen)};
        const auto s = scores(c);
        const double p = s.precision, r = s.recall;
        EXPECT_NEAR(s.f1, 2 * p * r / (p + r), 1e-12);
        EXPECT_GE(s.accuracy, 0.0);
        EXPECT_LE(s.accuracy, 100.0);
    }
}

TEST(Delta, PublishedRows) {
    EXPECT_EQ(csv::format_fixed(delta(99.21, 75.94), 2), "23.27");
    EXPECT_EQ(csv::format_fixed(delta(69.56, 47.27), 2), "22.29");
    EXPECT_EQ(csv::format_fixed(delta(50.0, 50.0), 2), "0.00");
    static_assert(delta(3.0, 1.0) == 2.0);
    EXPECT_EQ(delta(1.5, 4.25), -delta(4.25, 1.5));
}
