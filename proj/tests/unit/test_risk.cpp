#include "pusc/errors.hpp"
#include "pusc/risk.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace pusc;

namespace {

const double kLn2 = std::log(2.0);
const Loss kLogistic{LossKind::logistic};

std::vector<double> normals(std::mt19937_64& gen, std::size_t n, double mu, double sd) {
    std::normal_distribution<double> d(mu, sd);
    std::vector<double> v(n);
    for (double& x : v) x = d(gen);
    return v;
}

double mean_loss(const std::vector<double>& g, double sign) {
    double s = 0.0;
    for (double v : g) s += std::log1p(std::exp(-sign * v));
    return s / double(g.size());
}

} // namespace

TEST(Loss, LogisticValues) {
    EXPECT_NEAR(loss_logistic(0.0), kLn2, 1e-15);
    EXPECT_NEAR(loss_logistic(1.0) - loss_logistic(-1.0), -1.0, 1e-12);
    const double big = loss_logistic(-800.0);
    EXPECT_TRUE(std::isfinite(big));
    EXPECT_NEAR(big, 800.0, 1e-9);
    EXPECT_GE(loss_logistic(800.0), 0.0);
    for (double m = -30; m <= 30; m += 0.5) {
        EXPECT_NEAR(loss_logistic(m), std::log1p(std::exp(-m)), 1e-14 * std::max(1.0, std::abs(m)));
    }
}

TEST(Loss, LogisticIdentityAtRandomMargins) {
    std::mt19937_64 gen(10);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 1000; ++i) {
        const double m = u(gen);
        EXPECT_LT(std::abs(loss_logistic(m) - loss_logistic(-m) + m), 1e-10);
    }
}

TEST(Loss, SigmoidValues) {
    EXPECT_DOUBLE_EQ(loss_sigmoid(0.0), 0.5);
    EXPECT_NEAR(loss_sigmoid(800.0), 0.0, 1e-300);
    EXPECT_DOUBLE_EQ(loss_sigmoid(-800.0), 1.0);
    double prev = 1.0;
    for (double m = -20; m <= 20; m += 0.25) {
        EXPECT_NEAR(loss_sigmoid(m) + loss_sigmoid(-m), 1.0, 1e-15);
        EXPECT_LE(loss_sigmoid(m), prev);
        prev = loss_sigmoid(m);
    }
}

TEST(Loss, DerivativesMatchDifferences) {
    for (double m = -8; m <= 8; m += 0.7) {
        const double h = 1e-6;
        EXPECT_NEAR(loss_logistic_derivative(m),
                    (loss_logistic(m + h) - loss_logistic(m - h)) / (2 * h), 1e-8);
        EXPECT_NEAR(loss_sigmoid_derivative(m),
                    (loss_sigmoid(m + h) - loss_sigmoid(m - h)) / (2 * h), 1e-8);
    }
    EXPECT_EQ(parse_loss("sigmoid"), LossKind::sigmoid);
    EXPECT_THROW(parse_loss("hinge"), ParameterError);
}

TEST(RiskComponents, ZeroScores) {
    const std::vector<double> gl{0, 0}, gu{0, 0};
    const auto cc = risk_components(gl, gu, 0.5, ScenarioMode::cc, kLogistic);
    EXPECT_NEAR(cc.r_label, 0.5 * kLn2, 1e-15);
    EXPECT_NEAR(cc.r_corr, 0.5 * kLn2, 1e-15);
    EXPECT_NEAR(cc.r_dist, kLn2, 1e-15);
    EXPECT_NEAR(upu_risk(cc), kLn2, 1e-15);
    const auto ss = risk_components(gl, gu, 0.5, ScenarioMode::ss, kLogistic);
    EXPECT_NEAR(ss.r_dist, kLn2, 1e-15);
    EXPECT_EQ(ss.n_labeled, 2u);
    EXPECT_EQ(ss.n_unlabeled, 2u);
}

TEST(RiskComponents, LargeLabeledScore) {
    const std::vector<double> gl{10.0}, gu{};
    const auto c = risk_components(gl, gu, 0.5, ScenarioMode::cc, kLogistic);
    EXPECT_NEAR(c.r_label, 2.2699449608432323e-05, 1e-18);
    EXPECT_NEAR(c.r_corr, 5.000022699449608, 1e-14);
    EXPECT_DOUBLE_EQ(c.r_dist, 0.0);
}

TEST(RiskComponents, SsDistSplitSum) {
    std::mt19937_64 gen(2);
    const auto gl = normals(gen, 37, 1, 2), gu = normals(gen, 91, -1, 2);
    const auto c = risk_components(gl, gu, 0.3, ScenarioMode::ss, kLogistic);
    std::vector<double> all = gl;
    all.insert(all.end(), gu.begin(), gu.end());
    EXPECT_NEAR(c.r_dist, mean_loss(all, -1), 1e-14);
    const double split = (37 * mean_loss(gl, -1) + 91 * mean_loss(gu, -1)) / 128.0;
    EXPECT_NEAR(c.r_dist, split, 1e-14);
    const auto d = risk_components(gl, gu, 0.3, ScenarioMode::ss, kLogistic, 256);
    EXPECT_NEAR(d.r_dist, split * 128.0 / 256.0, 1e-14);
}

TEST(RiskComponents, EmptyPartsAndErrors) {
    const std::vector<double> none, u{0.5, -0.5};
    const auto c = risk_components(none, u, 0.4, ScenarioMode::ss, kLogistic);
    EXPECT_EQ(c.r_label, 0.0);
    EXPECT_EQ(c.r_corr, 0.0);
    EXPECT_EQ(c.n_labeled, 0u);
    EXPECT_GT(c.r_dist, 0.0);
    EXPECT_THROW(risk_components(u, u, 0.0, ScenarioMode::cc, kLogistic), ParameterError);
    EXPECT_THROW(risk_components(u, u, 1.0, ScenarioMode::cc, kLogistic), ParameterError);
}

TEST(RiskComponents, GradientsMatchDifferences) {
    std::mt19937_64 gen(4);
    for (ScenarioMode mode : {ScenarioMode::ss, ScenarioMode::cc}) {
        auto gl = normals(gen, 5, 0.5, 1), gu = normals(gen, 7, -0.5, 1);
        const auto dg = risk_component_gradients(gl, gu, 0.4, mode, kLogistic);
        const double h = 1e-6;
        auto comp = [&] { return risk_components(gl, gu, 0.4, mode, kLogistic); };
        for (std::size_t i = 0; i < gl.size(); ++i) {
            const double keep = gl[i];
            gl[i] = keep + h;
            const auto p = comp();
            gl[i] = keep - h;
            const auto m = comp();
            gl[i] = keep;
            EXPECT_NEAR(dg.label_wrt_labeled[i], (p.r_label - m.r_label) / (2 * h), 1e-8);
            EXPECT_NEAR(dg.corr_wrt_labeled[i], (p.r_corr - m.r_corr) / (2 * h), 1e-8);
            EXPECT_NEAR(dg.dist_wrt_labeled[i], (p.r_dist - m.r_dist) / (2 * h), 1e-8);
        }
        for (std::size_t i = 0; i < gu.size(); ++i) {
            const double keep = gu[i];
            gu[i] = keep + h;
            const auto p = comp();
            gu[i] = keep - h;
            const auto m = comp();
            gu[i] = keep;
            EXPECT_NEAR(dg.dist_wrt_unlabeled[i], (p.r_dist - m.r_dist) / (2 * h), 1e-8);
        }
    }
}

TEST(Risk, UpuAndNnpuArithmetic) {
    RiskComponents c{0.3, 0.2, 0.4};
    EXPECT_NEAR(upu_risk(c), 0.1, 1e-15);
    auto nn = nnpu_risk(c, 0.0);
    EXPECT_NEAR(nn.value, 0.3, 1e-15);
    EXPECT_TRUE(nn.truncated);
    nn = nnpu_risk({0.3, 0.5, 0.4}, 0.0);
    EXPECT_NEAR(nn.value, 0.4, 1e-15);
    EXPECT_FALSE(nn.truncated);
    nn = nnpu_risk(c, 0.3);
    EXPECT_NEAR(nn.value, 0.3, 1e-15);
    EXPECT_FALSE(nn.truncated);
    EXPECT_THROW(nnpu_risk(c, -0.1), ParameterError);
}

TEST(Risk, NnpuNeverBelowLabelTerm) {
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        RiskComponents c{u(gen), u(gen), u(gen)};
        const auto nn = nnpu_risk(c, 0.0);
        EXPECT_GE(nn.value, c.r_label);
        if (c.r_dist >= c.r_corr) EXPECT_DOUBLE_EQ(nn.value, upu_risk(c));
    }
}

TEST(Risk, PerfectClassifierOnSeparableData) {
    // Scores far on the correct side: r_label ≈ 0 and the negative part
    // reduces to the negatives' (1−π)-weighted loss, which is ≥ 0.
    std::vector<double> pos(50, 30.0), neg(50, -30.0), all = pos;
    all.insert(all.end(), neg.begin(), neg.end());
    const auto c = risk_components(pos, all, 0.5, ScenarioMode::cc, kLogistic);
    EXPECT_LT(c.r_label, 1e-12);
    EXPECT_GE(c.negative_part(), -1e-12);
    EXPECT_NEAR(c.negative_part(), 0.5 * loss_logistic(30.0), 1e-12);
}

TEST(TrueRisk, Values) {
    std::vector<double> z(6, 0.0);
    std::vector<int> y{1, -1, 1, 1, -1, -1};
    EXPECT_NEAR(true_risk(z, y, kLogistic), kLn2, 1e-15);
    std::vector<double> far{100, -100, 100, 100, -100, -100};
    EXPECT_LT(true_risk(far, y, kLogistic), 1e-40);
    std::mt19937_64 gen(8);
    const auto g = normals(gen, 6, 0, 2);
    double sp = 0, sn = 0;
    for (std::size_t i = 0; i < 6; ++i) (y[i] == 1 ? sp : sn) += loss_logistic(y[i] * g[i]);
    EXPECT_NEAR(true_risk(g, y, kLogistic), 0.5 * sp / 3 + 0.5 * sn / 3, 1e-14);
    EXPECT_THROW(true_risk(g, std::vector<int>{1}, kLogistic), ShapeError);
}

TEST(Decomposition, CcEqualsTrueRiskAtEmpiricalPrior) {
    std::mt19937_64 gen(12);
    const auto g = normals(gen, 400, 0, 2);
    std::vector<int> y(400);
    std::bernoulli_distribution b(0.35);
    for (int& v : y) v = b(gen) ? 1 : -1;
    const double pi = double(std::count(y.begin(), y.end(), 1)) / 400.0;
    EXPECT_NEAR(risk_decomposition_cc(g, y, pi, kLogistic), true_risk(g, y, kLogistic), 1e-12);
    std::vector<double> z(4, 0.0);
    EXPECT_NEAR(risk_decomposition_cc(z, std::vector<int>{1, -1, 1, -1}, 0.5, kLogistic), kLn2, 1e-15);
    EXPECT_NEAR(risk_decomposition_cc(std::vector<double>{0.7}, std::vector<int>{1}, 1.0, kLogistic),
                loss_logistic(0.7), 1e-15);
    EXPECT_THROW(risk_decomposition_cc(z, std::vector<int>(4, -1), 0.5, kLogistic), DataError);
}

TEST(Decomposition, SsCases) {
    std::vector<double> z(4, 0.0);
    std::vector<int> s{1, -1, -1, -1}, y{1, 1, -1, -1};
    EXPECT_NEAR(risk_decomposition_ss(z, s, y, 0.5, kLogistic), kLn2, 1e-15);
    // c = 1: every positive labeled, third coefficient π − n_L/n vanishes.
    std::vector<double> g{1.0, 2.0, -1.0, -3.0};
    std::vector<int> s1{1, 1, -1, -1}, y1{1, 1, -1, -1};
    const double want = 0.5 * (loss_logistic(1) + loss_logistic(2)) / 2 +
                        0.5 * (loss_logistic(1) + loss_logistic(3)) / 2;
    EXPECT_NEAR(risk_decomposition_ss(g, s1, y1, 0.5, kLogistic), want, 1e-14);
    EXPECT_THROW(risk_decomposition_ss(g, std::vector<int>(4, -1), y1, 0.5, kLogistic), DataError);
    EXPECT_THROW(risk_decomposition_ss(g, std::vector<int>{1, 1, 1, -1}, y1, 0.5, kLogistic),
                 DataError);
}

TEST(Form12, EqualsUpuSs) {
    std::mt19937_64 gen(14);
    std::uniform_int_distribution<int> size(1, 256);
    std::uniform_real_distribution<double> pr(0.05, 0.95);
    for (int t = 0; t < 100; ++t) {
        const auto gl = normals(gen, size(gen), 1, 3), gu = normals(gen, size(gen), -1, 3);
        const double pi = pr(gen);
        const double a = empirical_risk_ss_split(gl, gu, pi, kLogistic);
        const double b = upu_risk(risk_components(gl, gu, pi, ScenarioMode::ss, kLogistic));
        EXPECT_LT(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(b)));
    }
}

TEST(Form12, Degenerate) {
    std::vector<double> z(3, 0.0), none;
    EXPECT_NEAR(empirical_risk_ss_split(z, z, 0.4, kLogistic), kLn2, 1e-15);
    std::vector<double> gl{0.3, -1.2, 2.0};
    const double want = 0.4 * mean_loss(gl, 1) + mean_loss(gl, -1) - 0.4 * mean_loss(gl, -1);
    EXPECT_NEAR(empirical_risk_ss_split(gl, none, 0.4, kLogistic), want, 1e-14);
    EXPECT_THROW(empirical_risk_ss_split(none, gl, 0.4, kLogistic), DataError);
}

TEST(LabelBiasGap, ConstantPermutedAndSeparated) {
    std::vector<double> z(6, 0.0);
    std::vector<int> s{1, 1, -1, -1, -1, -1};
    EXPECT_DOUBLE_EQ(ss_label_bias_gap(z, s, kLogistic), 0.0);
    EXPECT_THROW(ss_label_bias_gap(z, std::vector<int>(6, -1), kLogistic), DataError);

    // Good classifier on the two-Gaussian family with single-sample labels.
    std::mt19937_64 gen(16);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::bernoulli_distribution pos(0.5), lab(0.9);
    const std::size_t n = 20000;
    std::vector<double> g(n);
    std::vector<int> ss(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool p = pos(gen);
        const double x = (p ? 2.0 : -2.0) + nd(gen);
        g[i] = 4.0 * x;
        ss[i] = (p && lab(gen)) ? 1 : -1;
    }
    EXPECT_GT(ss_label_bias_gap(g, ss, kLogistic), 1.0);

    std::shuffle(ss.begin(), ss.end(), gen);
    double gap = ss_label_bias_gap(g, ss, kLogistic);
    // standard error of a difference of two group means of ℓ(−g)
    std::vector<double> lo(n);
    for (std::size_t i = 0; i < n; ++i) lo[i] = loss_logistic(-g[i]);
    const double m = std::accumulate(lo.begin(), lo.end(), 0.0) / n;
    double var = 0;
    for (double v : lo) var += (v - m) * (v - m);
    var /= n - 1;
    const double nl = double(std::count(ss.begin(), ss.end(), 1));
    EXPECT_LT(std::abs(gap), 3.0 * std::sqrt(var / nl + var / (n - nl)));
}
