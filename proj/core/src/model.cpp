#include "pusc/model.hpp"

#include "pusc/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

namespace pusc {

std::string_view to_string(Activation a) noexcept {
    return a == Activation::relu ? "relu" : "tanh";
}

Activation parse_activation(std::string_view text) {
    if (text == "relu") {
        return Activation::relu;
    }
    if (text == "tanh") {
        return Activation::tanh;
    }
    throw ParameterError("unknown activation '" + std::string(text) + "' (expected relu or tanh)");
}

double GradientBundle::squared_norm() const noexcept {
    double acc = 0.0;
    for (const auto& w : weights) {
        for (double v : w.data()) {
            acc += v * v;
        }
    }
    for (const auto& b : biases) {
        for (double v : b) {
            acc += v * v;
        }
    }
    return acc;
}

namespace {

void check_dims(const std::vector<std::size_t>& dims) {
    if (dims.size() < 2) {
        throw ParameterError("MLPModel: need at least input and output dims");
    }
    if (dims.back() != 1) {
        throw ParameterError("MLPModel: final layer dim must be 1, got " +
                             std::to_string(dims.back()));
    }
    if (std::find(dims.begin(), dims.end(), std::size_t{0}) != dims.end()) {
        throw ParameterError("MLPModel: layer dims must be positive");
    }
}

double activate(Activation a, double z) noexcept {
    return a == Activation::relu ? std::max(z, 0.0) : std::tanh(z);
}

double activate_derivative(Activation a, double z) noexcept {
    if (a == Activation::relu) {
        return z > 0.0 ? 1.0 : 0.0;
    }
    const double t = std::tanh(z);
    return 1.0 - t * t;
}

void add_bias(Matrix& z, const std::vector<double>& b) {
    for (std::size_t r = 0; r < z.rows(); ++r) {
        auto row = z.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) {
            row[c] += b[c];
        }
    }
}

} // namespace

MLPModel MLPModel::zeros(std::vector<std::size_t> layer_dims, Activation activation) {
    check_dims(layer_dims);
    MLPModel m;
    m.dims_ = std::move(layer_dims);
    m.activation_ = activation;
    for (std::size_t k = 0; k + 1 < m.dims_.size(); ++k) {
        m.weights_.emplace_back(m.dims_[k + 1], m.dims_[k]);
        m.biases_.emplace_back(m.dims_[k + 1], 0.0);
    }
    return m;
}

MLPModel MLPModel::init(std::vector<std::size_t> layer_dims, Activation activation, Rng& rng) {
    MLPModel m = zeros(std::move(layer_dims), activation);
    const double hidden_gain = activation == Activation::relu ? 2.0 : 1.0;
    for (std::size_t k = 0; k < m.weights_.size(); ++k) {
        const bool output = k + 1 == m.weights_.size();
        const double sd = std::sqrt((output ? 1.0 : hidden_gain) / double(m.dims_[k]));
        for (double& v : m.weights_[k].data()) {
            v = sd * rng.normal();
        }
    }
    return m;
}

std::size_t MLPModel::parameter_count() const noexcept {
    std::size_t n = 0;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        n += weights_[k].size() + biases_[k].size();
    }
    return n;
}

std::vector<double> MLPModel::flatten() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        out.insert(out.end(), weights_[k].data().begin(), weights_[k].data().end());
        out.insert(out.end(), biases_[k].begin(), biases_[k].end());
    }
    return out;
}

std::vector<double> MLPModel::flatten(const GradientBundle& grads) {
    std::vector<double> out;
    for (std::size_t k = 0; k < grads.weights.size(); ++k) {
        out.insert(out.end(), grads.weights[k].data().begin(), grads.weights[k].data().end());
        out.insert(out.end(), grads.biases[k].begin(), grads.biases[k].end());
    }
    return out;
}

void MLPModel::assign_flat(std::span<const double> params) {
    if (params.size() != parameter_count()) {
        throw ShapeError("MLPModel::assign_flat: expected " + std::to_string(parameter_count()) +
                         " values, got " + std::to_string(params.size()));
    }
    require_finite(params, "MLPModel::assign_flat");
    std::size_t pos = 0;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        for (double& v : weights_[k].data()) {
            v = params[pos++];
        }
        for (double& v : biases_[k]) {
            v = params[pos++];
        }
    }
}

std::vector<Matrix> MLPModel::hidden_preactivations(const Matrix& x,
                                                    std::vector<Matrix>* inputs) const {
    if (x.cols() != input_dim()) {
        throw ShapeError("MLPModel: input has " + std::to_string(x.cols()) +
                         " columns, model expects " + std::to_string(input_dim()));
    }
    std::vector<Matrix> pre;
    Matrix h = x;
    for (std::size_t k = 0; k + 1 < weights_.size(); ++k) {
        Matrix z = matmul_transposed(h, weights_[k]);
        add_bias(z, biases_[k]);
        if (inputs) {
            inputs->push_back(std::move(h));
        }
        h = z;
        for (double& v : h.data()) {
            v = activate(activation_, v);
        }
        pre.push_back(std::move(z));
    }
    if (inputs) {
        inputs->push_back(std::move(h));
    }
    return pre;
}

std::vector<double> MLPModel::forward(const Matrix& x) const {
    std::vector<Matrix> inputs;
    hidden_preactivations(x, &inputs);
    Matrix out = matmul_transposed(inputs.back(), weights_.back());
    add_bias(out, biases_.back());
    return {out.data().begin(), out.data().end()};
}

GradientBundle MLPModel::backward(const Matrix& x, std::span<const double> upstream) const {
    if (upstream.size() != x.rows()) {
        throw ShapeError("MLPModel::backward: upstream has " + std::to_string(upstream.size()) +
                         " entries for " + std::to_string(x.rows()) + " rows");
    }
    require_finite(upstream, "MLPModel::backward upstream");
    std::vector<Matrix> inputs;
    const auto pre = hidden_preactivations(x, &inputs);

    GradientBundle grads = zero_gradients();
    Matrix delta(x.rows(), 1, std::vector<double>(upstream.begin(), upstream.end()));
    for (std::size_t k = weights_.size(); k-- > 0;) {
        grads.weights[k] = transposed_matmul(delta, inputs[k]);
        auto& gb = grads.biases[k];
        for (std::size_t r = 0; r < delta.rows(); ++r) {
            auto row = delta.row(r);
            for (std::size_t c = 0; c < row.size(); ++c) {
                gb[c] += row[c];
            }
        }
        if (k == 0) {
            break;
        }
        Matrix back = matmul(delta, weights_[k]);
        const Matrix& z = pre[k - 1];
        auto bd = back.data();
        auto zd = z.data();
        for (std::size_t i = 0; i < bd.size(); ++i) {
            bd[i] *= activate_derivative(activation_, zd[i]);
        }
        delta = std::move(back);
    }
    return grads;
}

double MLPModel::min_hidden_preactivation(const Matrix& x) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& z : hidden_preactivations(x, nullptr)) {
        for (double v : z.data()) {
            best = std::min(best, std::abs(v));
        }
    }
    return best;
}

void MLPModel::apply_step(const GradientBundle& grads, double step) {
    if (grads.weights.size() != weights_.size()) {
        throw ShapeError("MLPModel::apply_step: gradient bundle does not match the model");
    }
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        auto w = weights_[k].data();
        auto gw = grads.weights[k].data();
        if (w.size() != gw.size() || biases_[k].size() != grads.biases[k].size()) {
            throw ShapeError("MLPModel::apply_step: layer " + std::to_string(k) + " shape mismatch");
        }
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i] -= step * gw[i];
        }
        for (std::size_t i = 0; i < biases_[k].size(); ++i) {
            biases_[k][i] -= step * grads.biases[k][i];
        }
    }
}

GradientBundle MLPModel::zero_gradients() const {
    GradientBundle g;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        g.weights.emplace_back(weights_[k].rows(), weights_[k].cols());
        g.biases.emplace_back(biases_[k].size(), 0.0);
    }
    return g;
}

GradCheckResult grad_check(const MLPModel& model, const DifferentiableObjective& objective,
                           double h, double floor) {
    if (!(h > 0.0)) {
        throw ParameterError("grad_check: h must be positive");
    }
    const auto analytic = MLPModel::flatten(objective.gradient(model));
    const auto base = model.flatten();
    if (analytic.size() != base.size()) {
        throw ShapeError("grad_check: gradient size does not match parameter count");
    }
    GradCheckResult result;
    MLPModel probe = model;
    auto params = base;
    for (std::size_t i = 0; i < params.size(); ++i) {
        params[i] = base[i] + h;
        probe.assign_flat(params);
        const double up = objective.value(probe);
        params[i] = base[i] - h;
        probe.assign_flat(params);
        const double down = objective.value(probe);
        params[i] = base[i];

        const double numeric = (up - down) / (2.0 * h);
        const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), floor});
        const double err = std::abs(analytic[i] - numeric) / scale;
        if (err > result.max_rel_error) {
            result = {err, i, analytic[i], numeric};
        }
    }
    return result;
}

void save_model(const MLPModel& model, const std::filesystem::path& path) {
    nlohmann::json doc;
    doc["format"] = "pusc-mlp";
    doc["version"] = 1;
    doc["activation"] = std::string(to_string(model.activation()));
    doc["layer_dims"] = model.layer_dims();
    auto& layers = doc["layers"] = nlohmann::json::array();
    for (std::size_t k = 0; k < model.layer_count(); ++k) {
        const Matrix& w = model.weights(k);
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t r = 0; r < w.rows(); ++r) {
            rows.push_back(std::vector<double>(w.row(r).begin(), w.row(r).end()));
        }
        layers.push_back({{"weights", rows}, {"biases", model.biases(k)}});
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << doc.dump(1) << '\n';
}

MLPModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
        if (doc.at("format") != "pusc-mlp" || doc.at("version") != 1) {
            throw FormatError(path.string() + ": not a version-1 pusc-mlp checkpoint");
        }
        auto dims = doc.at("layer_dims").get<std::vector<std::size_t>>();
        MLPModel model =
            MLPModel::zeros(dims, parse_activation(doc.at("activation").get<std::string>()));
        const auto& layers = doc.at("layers");
        if (layers.size() != model.layer_count()) {
            throw FormatError(path.string() + ": layer count does not match layer_dims");
        }
        for (std::size_t k = 0; k < model.layer_count(); ++k) {
            auto rows = layers[k].at("weights").get<std::vector<std::vector<double>>>();
            Matrix w = Matrix::from_rows(rows);
            if (w.rows() != dims[k + 1] || w.cols() != dims[k]) {
                throw FormatError(path.string() + ": layer " + std::to_string(k) +
                                  " weights have the wrong shape");
            }
            auto b = layers[k].at("biases").get<std::vector<double>>();
            if (b.size() != dims[k + 1]) {
                throw FormatError(path.string() + ": layer " + std::to_string(k) +
                                  " biases have the wrong length");
            }
            require_finite(b, "load_model biases");
            model.weights(k) = std::move(w);
            model.biases(k) = std::move(b);
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

} // namespace pusc
