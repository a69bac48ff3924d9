#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace pusc {

enum class LossKind { logistic, sigmoid };

std::string_view to_string(LossKind kind) noexcept;
LossKind parse_loss(std::string_view text);

/// log(1 + e^{−m}), evaluated without overflow for large |m|.
double loss_logistic(double margin) noexcept;
double loss_logistic_derivative(double margin) noexcept;

/// 1 / (1 + e^{m}).
double loss_sigmoid(double margin) noexcept;
double loss_sigmoid_derivative(double margin) noexcept;

/// Margin loss ℓ(m) from the fixed catalogue.
class Loss {
public:
    constexpr Loss(LossKind kind = LossKind::logistic) noexcept : kind_(kind) {}

    LossKind kind() const noexcept { return kind_; }
    double value(double margin) const noexcept;
    double derivative(double margin) const noexcept;

private:
    LossKind kind_;
};

/// Which population the unlabeled part is assumed to represent.
enum class ScenarioMode {
    ss, ///< all rows together represent P_X
    cc, ///< the unlabeled rows alone represent P_X
};

std::string_view to_string(ScenarioMode mode) noexcept;

/// Per-batch risk terms: labeled risk, general-distribution risk and the
/// PU correction. All three are non-negative.
struct RiskComponents {
    double r_label = 0.0;
    double r_dist = 0.0;
    double r_corr = 0.0;
    std::size_t n_labeled = 0;
    std::size_t n_unlabeled = 0;

    /// r_dist − r_corr, the part that nnPU keeps non-negative.
    double negative_part() const noexcept { return r_dist - r_corr; }
};

/// Computes the three components for one batch.
///
///   r_label = π · mean_L ℓ(g)
///   r_corr  = π · mean_L ℓ(−g)
///   r_dist  = mean_U ℓ(−g)                       (cc)
///           = (1/n) Σ_{L∪U} ℓ(−g)                 (ss)
///
/// In ss mode n is `ss_denominator` when given and |L| + |U| otherwise.
/// An empty labeled part yields r_label = r_corr = 0; an empty unlabeled
/// part in cc mode yields r_dist = 0.
RiskComponents risk_components(std::span<const double> g_labeled,
                               std::span<const double> g_unlabeled, double pi, ScenarioMode mode,
                               const Loss& loss,
                               std::optional<std::size_t> ss_denominator = std::nullopt);

/// Derivatives of each component with respect to every score in the batch.
struct ComponentScoreGradients {
    std::vector<double> label_wrt_labeled;   ///< ∂r_label/∂g on L
    std::vector<double> corr_wrt_labeled;    ///< ∂r_corr/∂g on L
    std::vector<double> dist_wrt_labeled;    ///< ∂r_dist/∂g on L (zero in cc mode)
    std::vector<double> dist_wrt_unlabeled;  ///< ∂r_dist/∂g on U
};

ComponentScoreGradients risk_component_gradients(
    std::span<const double> g_labeled, std::span<const double> g_unlabeled, double pi,
    ScenarioMode mode, const Loss& loss, std::optional<std::size_t> ss_denominator = std::nullopt);

/// Unbiased estimate r_label + r_dist − r_corr; may be negative.
double upu_risk(const RiskComponents& comp) noexcept;

struct NnpuRisk {
    double value;
    bool truncated;
};

/// value = r_label + max(r_dist − r_corr, 0); truncated is the training
/// trigger r_dist − r_corr <= −beta.
NnpuRisk nnpu_risk(const RiskComponents& comp, double beta);

/// mean ℓ(y·g).
double true_risk(std::span<const double> g, std::span<const int> y, const Loss& loss);

/// π·E_{Y=1}ℓ(g) + E_X ℓ(−g) − π·E_{Y=1}ℓ(−g) with empirical means.
double risk_decomposition_cc(std::span<const double> g, std::span<const int> y, double pi,
                             const Loss& loss);

/// π·E_{S=1}ℓ(g) + P(S=−1)·E_{S=−1}ℓ(−g) − P(Y=1,S=−1)·E_{S=1}ℓ(−g), with
/// P(S=−1) = n_U/n and P(Y=1,S=−1) = π − n_L/n. y, when non-empty, is only
/// used to check that no labeled row is a true negative.
double risk_decomposition_ss(std::span<const double> g, std::span<const int> s,
                             std::span<const int> y, double pi, const Loss& loss);

/// Single-sample empirical risk with the S=−1 rows and the labeled rows
/// summed separately:
///   (π/n_L)Σ_L ℓ(g) + (1/n)Σ_U ℓ(−g) − (π − n_L/n)(1/n_L)Σ_L ℓ(−g).
/// Algebraically equal to upu_risk of the ss components.
double empirical_risk_ss_split(std::span<const double> g_labeled,
                                std::span<const double> g_unlabeled, double pi, const Loss& loss);

/// mean_{S=1}ℓ(−g) − mean_{S=−1}ℓ(−g). Zero exactly when the c-c formula
/// stays valid on single-sample data.
double ss_label_bias_gap(std::span<const double> g, std::span<const int> s, const Loss& loss);

} // namespace pusc
