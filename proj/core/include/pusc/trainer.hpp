#pragma once

#include "pusc/datasets.hpp"
#include "pusc/model.hpp"
#include "pusc/risk.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

namespace pusc {

enum class Method { nnpu_ss, nnpu_cc, upu_ss, upu_cc };

std::string_view to_string(Method m) noexcept;
Method parse_method(std::string_view text);
ScenarioMode mode_of(Method m) noexcept;
bool is_non_negative(Method m) noexcept;

enum class Optimizer { sgd, adam };

std::string_view to_string(Optimizer o) noexcept;
Optimizer parse_optimizer(std::string_view text);

struct TrainerConfig {
    Method method = Method::nnpu_ss;
    double beta = 0.0;
    double gamma = 1.0;
    double eta = 0.1;
    std::size_t epochs = 50;
    std::size_t batch_size = 64;
    Optimizer optimizer = Optimizer::sgd;
    std::uint64_t seed = 0;
    LossKind loss = LossKind::logistic;
    // Adaptive-moment constants; unused by sgd.
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;

    /// Throws ParameterError on an out-of-domain field.
    void validate() const;
};

/// Batch averages for one epoch.
struct EpochTrace {
    std::size_t epoch = 0;
    double mean_r_label = 0.0;
    double mean_r_dist = 0.0;
    double mean_r_corr = 0.0;
    double mean_objective = 0.0;
    /// Fraction of batches whose negative part fell to −beta or below.
    double truncation_fraction = 0.0;
    std::optional<double> test_accuracy;
};

struct TrainResult {
    MLPModel model;
    std::vector<EpochTrace> trace;
};

/// d(x) = +1 when g(x) >= 0, −1 otherwise.
std::vector<int> classify_scores(std::span<const double> g);

/// Fraction of rows where classify(model(x)) matches y.
double accuracy_of(const MLPModel& model, const LabeledDataset& data);

/// Parameter update chosen for one minibatch.
struct BatchStep {
    RiskComponents components;
    double objective = 0.0;
    bool truncated = false;
    /// Gradient actually followed (of the unbiased risk or of the surrogate).
    GradientBundle gradient;
    /// Multiplier on the base step size: 1 for the risk, gamma for the surrogate.
    double step_scale = 1.0;
};

/// Computes the components and the update direction for a batch without
/// touching the model. Rows with s=+1 form the labeled part.
BatchStep compute_batch_step(const MLPModel& model, const Matrix& x, std::span<const int> s,
                             double pi, const TrainerConfig& cfg);

/// Minibatch training. Each epoch shuffles the rows with the run's Rng,
/// cuts consecutive batches (the last one may be short), and for every batch
/// either descends on r_label + r_dist − r_corr with step eta or, for the
/// nnPU methods when r_dist − r_corr <= −beta, descends on
/// r_corr − r_dist with step gamma·eta.
TrainResult train(const PUDataset& dataset, const TrainerConfig& cfg, MLPModel model,
                  const LabeledDataset* test = nullptr);

/// CSV with columns epoch,r_label,r_dist,r_corr,objective,truncation_fraction,test_accuracy.
void save_trace_csv(const std::vector<EpochTrace>& trace, const std::filesystem::path& path);
std::vector<EpochTrace> load_trace_csv(const std::filesystem::path& path);

} // namespace pusc
