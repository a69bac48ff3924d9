#include "pusc/risk.hpp"

#include "pusc/errors.hpp"

#include <cmath>
#include <string>

namespace pusc {

std::string_view to_string(LossKind kind) noexcept {
    return kind == LossKind::logistic ? "logistic" : "sigmoid";
}

LossKind parse_loss(std::string_view text) {
    if (text == "logistic") {
        return LossKind::logistic;
    }
    if (text == "sigmoid") {
        return LossKind::sigmoid;
    }
    throw ParameterError("unknown loss '" + std::string(text) + "' (expected logistic or sigmoid)");
}

std::string_view to_string(ScenarioMode mode) noexcept {
    return mode == ScenarioMode::ss ? "ss" : "cc";
}

double loss_logistic(double margin) noexcept {
    if (margin >= 0.0) {
        return std::log1p(std::exp(-margin));
    }
    return -margin + std::log1p(std::exp(margin));
}

double loss_logistic_derivative(double margin) noexcept {
    if (margin >= 0.0) {
        const double e = std::exp(-margin);
        return -e / (1.0 + e);
    }
    return -1.0 / (1.0 + std::exp(margin));
}

double loss_sigmoid(double margin) noexcept {
    if (margin >= 0.0) {
        const double e = std::exp(-margin);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(margin));
}

double loss_sigmoid_derivative(double margin) noexcept {
    const double v = loss_sigmoid(margin);
    return -v * (1.0 - v);
}

double Loss::value(double margin) const noexcept {
    return kind_ == LossKind::logistic ? loss_logistic(margin) : loss_sigmoid(margin);
}

double Loss::derivative(double margin) const noexcept {
    return kind_ == LossKind::logistic ? loss_logistic_derivative(margin)
                                       : loss_sigmoid_derivative(margin);
}

namespace {

void check_pi(double pi) {
    if (!(pi > 0.0 && pi < 1.0)) {
        throw ParameterError("class prior pi must lie in (0,1), got " + std::to_string(pi));
    }
}

double sum_loss(std::span<const double> g, double sign, const Loss& loss) {
    double acc = 0.0;
    for (double v : g) {
        acc += loss.value(sign * v);
    }
    return acc;
}

std::size_t ss_count(std::span<const double> g_labeled, std::span<const double> g_unlabeled,
                     std::optional<std::size_t> ss_denominator) {
    const std::size_t n = ss_denominator.value_or(g_labeled.size() + g_unlabeled.size());
    if (n == 0 && !(g_labeled.empty() && g_unlabeled.empty())) {
        throw ParameterError("risk_components: ss denominator must be positive");
    }
    return n;
}

} // namespace

RiskComponents risk_components(std::span<const double> g_labeled,
                               std::span<const double> g_unlabeled, double pi, ScenarioMode mode,
                               const Loss& loss, std::optional<std::size_t> ss_denominator) {
    check_pi(pi);
    RiskComponents comp;
    comp.n_labeled = g_labeled.size();
    comp.n_unlabeled = g_unlabeled.size();
    if (!g_labeled.empty()) {
        const double n_l = double(g_labeled.size());
        comp.r_label = pi * sum_loss(g_labeled, 1.0, loss) / n_l;
        comp.r_corr = pi * sum_loss(g_labeled, -1.0, loss) / n_l;
    }
    if (mode == ScenarioMode::cc) {
        if (!g_unlabeled.empty()) {
            comp.r_dist = sum_loss(g_unlabeled, -1.0, loss) / double(g_unlabeled.size());
        }
    } else {
        const std::size_t n = ss_count(g_labeled, g_unlabeled, ss_denominator);
        if (n > 0) {
            comp.r_dist =
                (sum_loss(g_labeled, -1.0, loss) + sum_loss(g_unlabeled, -1.0, loss)) / double(n);
        }
    }
    return comp;
}

ComponentScoreGradients risk_component_gradients(std::span<const double> g_labeled,
                                                 std::span<const double> g_unlabeled, double pi,
                                                 ScenarioMode mode, const Loss& loss,
                                                 std::optional<std::size_t> ss_denominator) {
    check_pi(pi);
    ComponentScoreGradients out;
    out.label_wrt_labeled.assign(g_labeled.size(), 0.0);
    out.corr_wrt_labeled.assign(g_labeled.size(), 0.0);
    out.dist_wrt_labeled.assign(g_labeled.size(), 0.0);
    out.dist_wrt_unlabeled.assign(g_unlabeled.size(), 0.0);

    if (!g_labeled.empty()) {
        const double w = pi / double(g_labeled.size());
        for (std::size_t i = 0; i < g_labeled.size(); ++i) {
            out.label_wrt_labeled[i] = w * loss.derivative(g_labeled[i]);
            // d/dg ℓ(−g) = −ℓ'(−g)
            out.corr_wrt_labeled[i] = -w * loss.derivative(-g_labeled[i]);
        }
    }
    if (mode == ScenarioMode::cc) {
        if (!g_unlabeled.empty()) {
            const double w = 1.0 / double(g_unlabeled.size());
            for (std::size_t i = 0; i < g_unlabeled.size(); ++i) {
                out.dist_wrt_unlabeled[i] = -w * loss.derivative(-g_unlabeled[i]);
            }
        }
    } else {
        const std::size_t n = ss_count(g_labeled, g_unlabeled, ss_denominator);
        if (n > 0) {
            const double w = 1.0 / double(n);
            for (std::size_t i = 0; i < g_labeled.size(); ++i) {
                out.dist_wrt_labeled[i] = -w * loss.derivative(-g_labeled[i]);
            }
            for (std::size_t i = 0; i < g_unlabeled.size(); ++i) {
                out.dist_wrt_unlabeled[i] = -w * loss.derivative(-g_unlabeled[i]);
            }
        }
    }
    return out;
}

double upu_risk(const RiskComponents& comp) noexcept {
    return comp.r_label + comp.r_dist - comp.r_corr;
}

NnpuRisk nnpu_risk(const RiskComponents& comp, double beta) {
    if (!(beta >= 0.0)) {
        throw ParameterError("nnpu_risk: beta must be non-negative");
    }
    const double negative = comp.negative_part();
    return {comp.r_label + std::max(negative, 0.0), negative <= -beta};
}

double true_risk(std::span<const double> g, std::span<const int> y, const Loss& loss) {
    if (g.size() != y.size()) {
        throw ShapeError("true_risk: scores and labels differ in length");
    }
    if (g.empty()) {
        throw DataError("true_risk: empty input");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        acc += loss.value(double(y[i]) * g[i]);
    }
    return acc / double(g.size());
}

double risk_decomposition_cc(std::span<const double> g, std::span<const int> y, double pi,
                             const Loss& loss) {
    if (g.size() != y.size()) {
        throw ShapeError("risk_decomposition_cc: scores and labels differ in length");
    }
    if (!(pi >= 0.0 && pi <= 1.0)) {
        throw ParameterError("risk_decomposition_cc: pi must lie in [0,1]");
    }
    double pos_plus = 0.0, pos_minus = 0.0, all_minus = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double minus = loss.value(-g[i]);
        all_minus += minus;
        if (y[i] == 1) {
            pos_plus += loss.value(g[i]);
            pos_minus += minus;
            ++n_pos;
        }
    }
    if (n_pos == 0) {
        throw DataError("risk_decomposition_cc: no positive rows");
    }
    const double np = double(n_pos);
    return pi * pos_plus / np + all_minus / double(g.size()) - pi * pos_minus / np;
}

double risk_decomposition_ss(std::span<const double> g, std::span<const int> s,
                             std::span<const int> y, double pi, const Loss& loss) {
    if (g.size() != s.size() || (!y.empty() && y.size() != s.size())) {
        throw ShapeError("risk_decomposition_ss: input lengths differ");
    }
    double lab_plus = 0.0, lab_minus = 0.0, unl_minus = 0.0;
    std::size_t n_l = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (s[i] == 1) {
            if (!y.empty() && y[i] != 1) {
                throw DataError("risk_decomposition_ss: labeled row " + std::to_string(i) +
                                " is a true negative");
            }
            lab_plus += loss.value(g[i]);
            lab_minus += loss.value(-g[i]);
            ++n_l;
        } else {
            unl_minus += loss.value(-g[i]);
        }
    }
    if (n_l == 0) {
        throw DataError("risk_decomposition_ss: no labeled rows");
    }
    const double n = double(g.size());
    const std::size_t n_u = g.size() - n_l;
    const double p_unlabeled = double(n_u) / n;
    const double p_pos_unlabeled = pi - double(n_l) / n;
    const double mean_unl = n_u > 0 ? unl_minus / double(n_u) : 0.0;
    return pi * lab_plus / double(n_l) + p_unlabeled * mean_unl -
           p_pos_unlabeled * lab_minus / double(n_l);
}

double empirical_risk_ss_split(std::span<const double> g_labeled,
                                std::span<const double> g_unlabeled, double pi, const Loss& loss) {
    if (g_labeled.empty()) {
        throw DataError("empirical_risk_ss_split: no labeled rows");
    }
    const double n_l = double(g_labeled.size());
    const double n = n_l + double(g_unlabeled.size());
    return pi / n_l * sum_loss(g_labeled, 1.0, loss) + sum_loss(g_unlabeled, -1.0, loss) / n -
           (pi - n_l / n) / n_l * sum_loss(g_labeled, -1.0, loss);
}

double ss_label_bias_gap(std::span<const double> g, std::span<const int> s, const Loss& loss) {
    if (g.size() != s.size()) {
        throw ShapeError("ss_label_bias_gap: input lengths differ");
    }
    double lab = 0.0, unl = 0.0;
    std::size_t n_l = 0, n_u = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double v = loss.value(-g[i]);
        if (s[i] == 1) {
            lab += v;
            ++n_l;
        } else {
            unl += v;
            ++n_u;
        }
    }
    if (n_l == 0 || n_u == 0) {
        throw DataError("ss_label_bias_gap: need both labeled and unlabeled rows");
    }
    return lab / double(n_l) - unl / double(n_u);
}

} // namespace pusc
