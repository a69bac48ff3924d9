#pragma once

#include "pusc/numerics.hpp"

#include <filesystem>
#include <functional>
#include <string_view>
#include <vector>

namespace pusc {

enum class Activation { relu, tanh };

std::string_view to_string(Activation a) noexcept;
Activation parse_activation(std::string_view text);

/// Gradients with the same shapes as an MLPModel's parameters.
struct GradientBundle {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    /// Squared Euclidean norm over every entry.
    double squared_norm() const noexcept;
};

/// Fully connected network with hidden activations and a linear scalar
/// output g(x).
class MLPModel {
public:
    MLPModel() = default;

    /// Weights ~ N(0, gain/fan_in) with gain 2 for relu and 1 for tanh
    /// (and 1 on the output layer); biases zero. The last dim must be 1.
    static MLPModel init(std::vector<std::size_t> layer_dims, Activation activation, Rng& rng);

    /// All parameters zero; useful as a baseline.
    static MLPModel zeros(std::vector<std::size_t> layer_dims, Activation activation);

    const std::vector<std::size_t>& layer_dims() const noexcept { return dims_; }
    Activation activation() const noexcept { return activation_; }
    std::size_t layer_count() const noexcept { return weights_.size(); }
    std::size_t input_dim() const noexcept { return dims_.front(); }

    const Matrix& weights(std::size_t layer) const { return weights_.at(layer); }
    Matrix& weights(std::size_t layer) { return weights_.at(layer); }
    const std::vector<double>& biases(std::size_t layer) const { return biases_.at(layer); }
    std::vector<double>& biases(std::size_t layer) { return biases_.at(layer); }

    std::size_t parameter_count() const noexcept;

    /// Flat view of every parameter: layer by layer, weights row-major
    /// then biases.
    std::vector<double> flatten() const;
    void assign_flat(std::span<const double> params);
    static std::vector<double> flatten(const GradientBundle& grads);

    /// One score per row of x.
    std::vector<double> forward(const Matrix& x) const;

    /// Exact gradient of Σ_i upstream_i · g(x_i) over all parameters.
    GradientBundle backward(const Matrix& x, std::span<const double> upstream) const;

    /// Smallest |pre-activation| over hidden units and rows; a relu network
    /// is differentiable at x when this is positive.
    double min_hidden_preactivation(const Matrix& x) const;

    /// params -= step · grads.
    void apply_step(const GradientBundle& grads, double step);

    GradientBundle zero_gradients() const;

    bool operator==(const MLPModel& other) const = default;

private:
    std::vector<Matrix> hidden_preactivations(const Matrix& x, std::vector<Matrix>* inputs) const;

    std::vector<std::size_t> dims_;
    std::vector<Matrix> weights_;
    std::vector<std::vector<double>> biases_;
    Activation activation_ = Activation::relu;
};

/// Objective over a model together with its analytic gradient.
struct DifferentiableObjective {
    std::function<double(const MLPModel&)> value;
    std::function<GradientBundle(const MLPModel&)> gradient;
};

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::size_t worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
};

/// Per-parameter relative error |a − n| / max(|a|, |n|, floor) between the
/// analytic gradient and central differences with step h.
GradCheckResult grad_check(const MLPModel& model, const DifferentiableObjective& objective,
                           double h = 1e-5, double floor = 1e-6);

/// Versioned JSON checkpoint:
///   {"format":"pusc-mlp","version":1,"activation":"relu",
///    "layer_dims":[...],"layers":[{"weights":[[...],...],"biases":[...]},...]}
void save_model(const MLPModel& model, const std::filesystem::path& path);
MLPModel load_model(const std::filesystem::path& path);

} // namespace pusc
