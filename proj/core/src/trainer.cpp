#include "pusc/trainer.hpp"

#include "pusc/csv.hpp"
#include "pusc/errors.hpp"

#include <cmath>
#include <fstream>
#include <string>

namespace pusc {

std::string_view to_string(Method m) noexcept {
    switch (m) {
    case Method::nnpu_ss: return "nnpu_ss";
    case Method::nnpu_cc: return "nnpu_cc";
    case Method::upu_ss: return "upu_ss";
    case Method::upu_cc: return "upu_cc";
    }
    return "unknown";
}

Method parse_method(std::string_view text) {
    for (Method m : {Method::nnpu_ss, Method::nnpu_cc, Method::upu_ss, Method::upu_cc}) {
        if (text == to_string(m)) {
            return m;
        }
    }
    throw ParameterError("unknown method '" + std::string(text) +
                         "' (expected nnpu_ss, nnpu_cc, upu_ss or upu_cc)");
}

ScenarioMode mode_of(Method m) noexcept {
    return (m == Method::nnpu_ss || m == Method::upu_ss) ? ScenarioMode::ss : ScenarioMode::cc;
}

bool is_non_negative(Method m) noexcept {
    return m == Method::nnpu_ss || m == Method::nnpu_cc;
}

std::string_view to_string(Optimizer o) noexcept {
    return o == Optimizer::sgd ? "sgd" : "adam";
}

Optimizer parse_optimizer(std::string_view text) {
    if (text == "sgd") {
        return Optimizer::sgd;
    }
    if (text == "adam") {
        return Optimizer::adam;
    }
    throw ParameterError("unknown optimizer '" + std::string(text) + "' (expected sgd or adam)");
}

void TrainerConfig::validate() const {
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        throw ParameterError("trainer: beta must be >= 0");
    }
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw ParameterError("trainer: gamma must lie in (0,1]");
    }
    if (!(eta > 0.0) || !std::isfinite(eta)) {
        throw ParameterError("trainer: eta must be > 0");
    }
    if (batch_size == 0) {
        throw ParameterError("trainer: batch_size must be >= 1");
    }
    if (optimizer == Optimizer::adam &&
        !(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0 &&
          adam_epsilon > 0.0)) {
        throw ParameterError("trainer: invalid adam constants");
    }
}

std::vector<int> classify_scores(std::span<const double> g) {
    std::vector<int> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        out[i] = g[i] >= 0.0 ? 1 : -1;
    }
    return out;
}

double accuracy_of(const MLPModel& model, const LabeledDataset& data) {
    if (data.size() == 0) {
        throw DataError("accuracy_of: empty test set");
    }
    const auto pred = classify_scores(model.forward(data.x));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        hits += pred[i] == data.y[i];
    }
    return double(hits) / double(pred.size());
}

BatchStep compute_batch_step(const MLPModel& model, const Matrix& x, std::span<const int> s,
                             double pi, const TrainerConfig& cfg) {
    if (s.size() != x.rows()) {
        throw ShapeError("compute_batch_step: s length differs from batch rows");
    }
    const auto g = model.forward(x);
    std::vector<double> g_l, g_u;
    for (std::size_t i = 0; i < g.size(); ++i) {
        (s[i] == 1 ? g_l : g_u).push_back(g[i]);
    }
    const Loss loss(cfg.loss);
    const ScenarioMode mode = mode_of(cfg.method);

    BatchStep step;
    step.components = risk_components(g_l, g_u, pi, mode, loss);
    const auto nn = nnpu_risk(step.components, cfg.beta);
    step.truncated = nn.truncated;
    const bool non_negative = is_non_negative(cfg.method);
    step.objective = non_negative ? nn.value : upu_risk(step.components);

    const auto dg = risk_component_gradients(g_l, g_u, pi, mode, loss);
    const bool surrogate = non_negative && nn.truncated;
    step.step_scale = surrogate ? cfg.gamma : 1.0;

    std::vector<double> upstream(g.size());
    std::size_t il = 0, iu = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (s[i] == 1) {
            const double d_neg = dg.dist_wrt_labeled[il] - dg.corr_wrt_labeled[il];
            upstream[i] = surrogate ? -d_neg : dg.label_wrt_labeled[il] + d_neg;
            ++il;
        } else {
            const double d_neg = dg.dist_wrt_unlabeled[iu];
            upstream[i] = surrogate ? -d_neg : d_neg;
            ++iu;
        }
    }
    step.gradient = model.backward(x, upstream);
    return step;
}

namespace {

class AdamState {
public:
    explicit AdamState(std::size_t n) : m_(n, 0.0), v_(n, 0.0) {}

    void apply(MLPModel& model, const GradientBundle& grads, double lr, const TrainerConfig& cfg) {
        ++t_;
        const auto g = MLPModel::flatten(grads);
        auto params = model.flatten();
        const double c1 = 1.0 - std::pow(cfg.adam_beta1, double(t_));
        const double c2 = 1.0 - std::pow(cfg.adam_beta2, double(t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = cfg.adam_beta1 * m_[i] + (1.0 - cfg.adam_beta1) * g[i];
            v_[i] = cfg.adam_beta2 * v_[i] + (1.0 - cfg.adam_beta2) * g[i] * g[i];
            params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + cfg.adam_epsilon);
        }
        model.assign_flat(params);
    }

private:
    std::vector<double> m_;
    std::vector<double> v_;
    std::size_t t_ = 0;
};

} // namespace

TrainResult train(const PUDataset& dataset, const TrainerConfig& cfg, MLPModel model,
                  const LabeledDataset* test) {
    cfg.validate();
    dataset.validate();
    if (dataset.x.cols() != model.input_dim()) {
        throw ShapeError("train: dataset has " + std::to_string(dataset.x.cols()) +
                         " features, model expects " + std::to_string(model.input_dim()));
    }
    const std::size_t n = dataset.size();
    if (cfg.epochs > 0 && cfg.batch_size > n) {
        throw ParameterError("train: batch_size " + std::to_string(cfg.batch_size) +
                             " exceeds dataset size " + std::to_string(n));
    }

    Rng rng(cfg.seed);
    AdamState adam(model.parameter_count());
    TrainResult result;
    result.trace.reserve(cfg.epochs);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto perm = rng.permutation(n);
        EpochTrace tr;
        tr.epoch = epoch + 1;
        std::size_t batches = 0, truncated = 0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size, ++batches) {
            const std::size_t end = std::min(n, start + cfg.batch_size);
            std::span<const std::size_t> idx(perm.data() + start, end - start);
            const Matrix xb = dataset.x.select_rows(idx);
            std::vector<int> sb(idx.size());
            for (std::size_t i = 0; i < idx.size(); ++i) {
                sb[i] = dataset.s[idx[i]];
            }
            try {
                const BatchStep step = compute_batch_step(model, xb, sb, dataset.pi, cfg);
                if (!std::isfinite(step.objective)) {
                    throw NumericError("objective is not finite");
                }
                const double lr = cfg.eta * step.step_scale;
                if (cfg.optimizer == Optimizer::sgd) {
                    model.apply_step(step.gradient, lr);
                } else {
                    adam.apply(model, step.gradient, lr, cfg);
                }
                tr.mean_r_label += step.components.r_label;
                tr.mean_r_dist += step.components.r_dist;
                tr.mean_r_corr += step.components.r_corr;
                tr.mean_objective += step.objective;
                truncated += step.truncated;
            } catch (const NumericError& e) {
                throw TrainingError("training diverged at epoch " + std::to_string(epoch + 1) +
                                    ", batch " + std::to_string(batches + 1) + ": " + e.what());
            }
        }
        const double nb = double(batches);
        tr.mean_r_label /= nb;
        tr.mean_r_dist /= nb;
        tr.mean_r_corr /= nb;
        tr.mean_objective /= nb;
        tr.truncation_fraction = double(truncated) / nb;
        if (test) {
            tr.test_accuracy = accuracy_of(model, *test);
        }
        result.trace.push_back(tr);
    }
    result.model = std::move(model);
    return result;
}

void save_trace_csv(const std::vector<EpochTrace>& trace, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << "epoch,r_label,r_dist,r_corr,objective,truncation_fraction,test_accuracy\n";
    for (const auto& t : trace) {
        out << t.epoch << ',' << csv::format_double(t.mean_r_label) << ','
            << csv::format_double(t.mean_r_dist) << ',' << csv::format_double(t.mean_r_corr) << ','
            << csv::format_double(t.mean_objective) << ','
            << csv::format_double(t.truncation_fraction) << ','
            << (t.test_accuracy ? csv::format_double(*t.test_accuracy) : std::string()) << '\n';
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

std::vector<EpochTrace> load_trace_csv(const std::filesystem::path& path) {
    const auto table = csv::read(path);
    static const char* kColumns[] = {"epoch",     "r_label",
                                     "r_dist",    "r_corr",
                                     "objective", "truncation_fraction",
                                     "test_accuracy"};
    for (std::size_t i = 0; i < 7; ++i) {
        if (table.header.size() != 7 || table.header[i] != kColumns[i]) {
            throw FormatError(path.string() + ": not a trace file (bad header)");
        }
    }
    std::vector<EpochTrace> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string ctx = path.string() + ": row " + std::to_string(r);
        EpochTrace t;
        t.epoch = static_cast<std::size_t>(csv::parse_double(row[0], ctx));
        t.mean_r_label = csv::parse_double(row[1], ctx);
        t.mean_r_dist = csv::parse_double(row[2], ctx);
        t.mean_r_corr = csv::parse_double(row[3], ctx);
        t.mean_objective = csv::parse_double(row[4], ctx);
        t.truncation_fraction = csv::parse_double(row[5], ctx);
        if (!(t.truncation_fraction >= 0.0 && t.truncation_fraction <= 1.0)) {
            throw FormatError(ctx + ": truncation_fraction outside [0,1]");
        }
        if (!row[6].empty()) {
            t.test_accuracy = csv::parse_double(row[6], ctx);
        }
        out.push_back(t);
    }
    return out;
}

} // namespace pusc
