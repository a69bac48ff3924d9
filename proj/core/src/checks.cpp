#include "pusc/harness.hpp"
#include "pusc/risk.hpp"
#include "pusc/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pusc {

namespace {

std::string sci(double v) {
    std::ostringstream o;
    o.precision(3);
    o << std::scientific << v;
    return o.str();
}

CheckOutcome check_ss_forms(Rng& rng) {
    const Loss loss(LossKind::logistic);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t nl = 1 + rng.below(50);
        const std::size_t nu = 1 + rng.below(200);
        const auto gl = rng_normal(rng, nl, 0.5, 2.0);
        const auto gu = rng_normal(rng, nu, -0.5, 2.0);
        const double pi = 0.05 + 0.9 * rng.uniform();
        const double a = upu_risk(risk_components(gl, gu, pi, ScenarioMode::ss, loss));
        const double b = empirical_risk_ss_split(gl, gu, pi, loss);
        worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
    return {"single-sample risk: component form equals split-sum form", worst < 1e-12,
            "max rel diff " + sci(worst)};
}

CheckOutcome check_ss_population_form(Rng& rng) {
    const Loss loss(LossKind::logistic);
    const std::size_t n = 500;
    const auto g = rng_normal(rng, n, 0.0, 1.5);
    std::vector<int> s(n), y(n);
    std::vector<double> gl, gu;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = rng.uniform() < 0.4 ? 1 : -1;
        s[i] = (y[i] == 1 && rng.uniform() < 0.5) ? 1 : -1;
        (s[i] == 1 ? gl : gu).push_back(g[i]);
    }
    const double a = upu_risk(risk_components(gl, gu, 0.4, ScenarioMode::ss, loss));
    const double b = risk_decomposition_ss(g, s, y, 0.4, loss);
    const double diff = std::abs(a - b);
    return {"single-sample risk: batch estimate equals decomposition on the full sample",
            diff < 1e-12, "abs diff " + sci(diff)};
}

CheckOutcome check_logistic_identity() {
    double worst = 0.0;
    for (double z = -30.0; z <= 30.0; z += 0.25) {
        worst = std::max(worst, std::abs(loss_logistic(z) - loss_logistic(-z) + z));
        worst = std::max(worst, std::abs(loss_sigmoid(z) + loss_sigmoid(-z) - 1.0));
    }
    return {"loss identities: logistic l(z)-l(-z)=-z, sigmoid l(z)+l(-z)=1", worst < 1e-12,
            "max abs error " + sci(worst)};
}

// Finite-difference check of the direction the trainer follows in one branch.
CheckOutcome check_branch_gradient(Rng& rng, Activation act, bool want_truncated) {
    const std::size_t n = 24;
    const std::size_t dim = 3;
    MLPModel model = MLPModel::init({dim, 6, 5, 1}, act, rng);
    Matrix x(n, dim);
    for (double& v : x.data()) {
        v = rng.normal();
    }
    if (act == Activation::relu) {
        // Keep central differences away from the kinks.
        for (int tries = 0; tries < 200 && model.min_hidden_preactivation(x) < 1e-3; ++tries) {
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t c = 0; c < dim; ++c) {
                    x(r, c) = rng.normal();
                }
            }
        }
    }
    // Labeled = highest-scoring rows. In cc mode with a large prior this
    // drives r_dist − r_corr negative, which exercises the surrogate branch.
    const auto g = model.forward(x);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return g[a] > g[b]; });
    std::vector<int> s(n, -1);
    const std::size_t n_labeled = want_truncated ? n / 2 : n / 4;
    for (std::size_t k = 0; k < n_labeled; ++k) {
        s[want_truncated ? order[k] : order[n - 1 - k]] = 1;
    }

    TrainerConfig cfg;
    cfg.method = want_truncated ? Method::nnpu_cc : Method::nnpu_ss;
    const double pi = want_truncated ? 0.95 : 0.3;
    const std::string name = std::string("gradient of the ") +
                             (want_truncated ? "surrogate" : "unbiased-risk") + " branch (" +
                             std::string(to_string(act)) + ")";

    const BatchStep probe = compute_batch_step(model, x, s, pi, cfg);
    if (probe.truncated != want_truncated) {
        return {name, false, "could not construct a batch in the requested branch"};
    }
    DifferentiableObjective obj;
    obj.value = [&](const MLPModel& m) {
        const auto gg = m.forward(x);
        std::vector<double> gl, gu;
        for (std::size_t i = 0; i < n; ++i) (s[i] == 1 ? gl : gu).push_back(gg[i]);
        const auto comp = risk_components(gl, gu, pi, mode_of(cfg.method), Loss(cfg.loss));
        return want_truncated ? comp.r_corr - comp.r_dist : upu_risk(comp);
    };
    obj.gradient = [&](const MLPModel& m) { return compute_batch_step(m, x, s, pi, cfg).gradient; };
    const auto res = grad_check(model, obj);
    const double tol = act == Activation::relu ? 1e-4 : 1e-6;
    return {name, res.max_rel_error < tol,
            "max rel error " + sci(res.max_rel_error) + " (tol " + sci(tol) + ")"};
}

CheckOutcome check_scar_proportion(Rng& rng) {
    const std::size_t n = 20000;
    GaussianMixtureSpec mix;
    mix.pi = 0.4;
    const LabeledDataset src = gaussian_mixture(n, mix, rng);
    ScarConfig cfg;
    cfg.c = 0.3;
    cfg.n = n;
    const PUDataset pu = scar_label(src, cfg, rng);
    std::size_t pos = 0;
    for (int y : src.y) pos += y == 1;
    const double expected = cfg.c * static_cast<double>(pos);
    const double se = std::sqrt(static_cast<double>(pos) * cfg.c * (1.0 - cfg.c));
    const double z = (static_cast<double>(pu.labeled_count()) - expected) / se;
    return {"single-sample labeling: labeled count matches c times positives", std::abs(z) < 4.0,
            "z = " + sci(z)};
}

CheckOutcome check_case_control_sizes(Rng& rng) {
    GaussianMixtureSpec mix;
    mix.pi = 0.5;
    const LabeledDataset src = gaussian_mixture(4000, mix, rng);
    CaseControlConfig cfg;
    cfg.c = 0.5;
    cfg.pi = 0.5;
    cfg.n = 1000;
    const PUDataset pu = case_control_sample(src, cfg, rng);
    const auto sizes = case_control_sizes(cfg.c, cfg.pi, cfg.n);
    const bool ok = sizes.labeled == 333 && pu.labeled_count() == 333 && pu.size() == 1000;
    return {"case-control sampling: 333 labeled of 1000 at c=0.5, pi=0.5", ok,
            "labeled " + std::to_string(pu.labeled_count()) + ", total " +
                std::to_string(pu.size())};
}

} // namespace

std::vector<CheckOutcome> run_self_checks(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<CheckOutcome> out;
    auto guarded = [&](auto&& fn) {
        try {
            out.push_back(fn());
        } catch (const std::exception& e) {
            out.push_back({"(check raised)", false, e.what()});
        }
    };
    guarded([&] { return check_ss_forms(rng); });
    guarded([&] { return check_ss_population_form(rng); });
    guarded([&] { return check_logistic_identity(); });
    for (Activation act : {Activation::tanh, Activation::relu}) {
        guarded([&] { return check_branch_gradient(rng, act, false); });
        guarded([&] { return check_branch_gradient(rng, act, true); });
    }
    guarded([&] { return check_scar_proportion(rng); });
    guarded([&] { return check_case_control_sizes(rng); });
    return out;
}

} // namespace pusc
