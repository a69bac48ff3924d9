#include "pusc/datasets.hpp"

#include "pusc/csv.hpp"
#include "pusc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

namespace pusc {

std::string_view to_string(Scenario s) noexcept {
    return s == Scenario::single_sample ? "ss" : "cc";
}

Scenario parse_scenario(std::string_view text) {
    if (text == "ss" || text == "single_sample") {
        return Scenario::single_sample;
    }
    if (text == "cc" || text == "case_control") {
        return Scenario::case_control;
    }
    throw ParameterError("unknown scenario '" + std::string(text) + "' (expected ss or cc)");
}

std::string_view to_string(PriorSource p) noexcept {
    switch (p) {
    case PriorSource::configured: return "configured";
    case PriorSource::user_supplied: return "user_supplied";
    case PriorSource::empirical: return "empirical";
    }
    return "unknown";
}

namespace {

void check_labels(std::span<const int> labels, const char* what) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 1 && labels[i] != -1) {
            throw FormatError(std::string(what) + ": row " + std::to_string(i) +
                              " has label " + std::to_string(labels[i]) + ", expected -1 or 1");
        }
    }
}

} // namespace

double LabeledDataset::empirical_prior() const noexcept {
    if (y.empty()) {
        return 0.0;
    }
    const auto pos = std::count(y.begin(), y.end(), 1);
    return static_cast<double>(pos) / static_cast<double>(y.size());
}

void LabeledDataset::validate() const {
    if (y.size() != x.rows()) {
        throw ShapeError("LabeledDataset: y has " + std::to_string(y.size()) + " entries, x has " +
                         std::to_string(x.rows()) + " rows");
    }
    check_labels(y, "LabeledDataset.y");
}

std::size_t PUDataset::labeled_count() const noexcept {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), 1));
}

void PUDataset::validate() const {
    if (s.size() != x.rows()) {
        throw ShapeError("PUDataset: s has " + std::to_string(s.size()) + " entries, x has " +
                         std::to_string(x.rows()) + " rows");
    }
    check_labels(s, "PUDataset.s");
    if (!(pi > 0.0 && pi < 1.0)) {
        throw ParameterError("PUDataset: pi must lie in (0,1)");
    }
    if (y_true) {
        if (y_true->size() != s.size()) {
            throw ShapeError("PUDataset: y_true length differs from s");
        }
        check_labels(*y_true, "PUDataset.y_true");
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == 1 && (*y_true)[i] != 1) {
                throw DataError("PUDataset: row " + std::to_string(i) +
                                " is labeled but its true class is negative");
            }
        }
    }
}

LabeledDataset gaussian_mixture(std::size_t n, const GaussianMixtureSpec& spec, Rng& rng) {
    if (!(spec.pi > 0.0 && spec.pi < 1.0)) {
        throw ParameterError("gaussian_mixture: pi must lie in (0,1)");
    }
    if (!(spec.sd > 0.0) || !std::isfinite(spec.sd)) {
        throw ParameterError("gaussian_mixture: sd must be positive");
    }
    if (spec.dim == 0) {
        throw ParameterError("gaussian_mixture: dim must be at least 1");
    }
    LabeledDataset out{Matrix(n, spec.dim), std::vector<int>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const bool positive = rng.uniform() < spec.pi;
        out.y[i] = positive ? 1 : -1;
        const double mean = positive ? spec.mu_pos : spec.mu_neg;
        for (double& v : out.x.row(i)) {
            v = mean + spec.sd * rng.normal();
        }
    }
    return out;
}

double gaussian_mixture_bayes_accuracy(const GaussianMixtureSpec& spec) {
    // Optimal rule thresholds the projection onto the mean difference.
    // Along that direction the classes are N(±δ/2, sd²) with
    // δ = |mu_pos − mu_neg|·√dim; the threshold shifts by
    // sd²·log((1−π)/π)/δ from the midpoint.
    const double delta = std::abs(spec.mu_pos - spec.mu_neg) * std::sqrt(double(spec.dim));
    const double shift = spec.sd * spec.sd * std::log((1.0 - spec.pi) / spec.pi) / delta;
    auto phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    const double acc_pos = phi((delta / 2.0 - shift) / spec.sd);
    const double acc_neg = phi((delta / 2.0 + shift) / spec.sd);
    return spec.pi * acc_pos + (1.0 - spec.pi) * acc_neg;
}

namespace {

struct ParsedCsv {
    Matrix x;
    std::optional<std::vector<int>> y;
    std::optional<std::vector<int>> s;
};

ParsedCsv parse_table(const csv::Table& table, const std::filesystem::path& path) {
    std::vector<std::size_t> feature_cols;
    for (std::size_t d = 0;; ++d) {
        const long col = table.column("f" + std::to_string(d));
        if (col < 0) {
            break;
        }
        feature_cols.push_back(static_cast<std::size_t>(col));
    }
    for (const auto& name : table.header) {
        const bool known = name == "y" || name == "s" ||
                           (name.size() > 1 && name[0] == 'f' &&
                            std::all_of(name.begin() + 1, name.end(), ::isdigit));
        if (!known) {
            throw FormatError(path.string() + ": unexpected column '" + name + "'");
        }
    }
    const long y_col = table.column("y");
    const long s_col = table.column("s");

    const std::size_t n = table.rows.size();
    ParsedCsv out{Matrix(n, feature_cols.size()), std::nullopt, std::nullopt};
    if (y_col >= 0) {
        out.y.emplace(n);
    }
    if (s_col >= 0) {
        out.s.emplace(n);
    }
    for (std::size_t r = 0; r < n; ++r) {
        const auto& row = table.rows[r];
        const std::string context = path.string() + ": data row " + std::to_string(r);
        for (std::size_t d = 0; d < feature_cols.size(); ++d) {
            out.x(r, d) = csv::parse_double(row[feature_cols[d]], context);
        }
        if (y_col >= 0) {
            (*out.y)[r] = csv::parse_label(row[static_cast<std::size_t>(y_col)], context);
        }
        if (s_col >= 0) {
            (*out.s)[r] = csv::parse_label(row[static_cast<std::size_t>(s_col)], context);
        }
    }
    return out;
}

void write_rows(std::ofstream& out, const Matrix& x, const std::vector<int>* y,
                const std::vector<int>* s) {
    for (std::size_t d = 0; d < x.cols(); ++d) {
        out << (d ? "," : "") << 'f' << d;
    }
    bool first = x.cols() == 0;
    if (y) {
        out << (first ? "" : ",") << 'y';
        first = false;
    }
    if (s) {
        out << (first ? "" : ",") << 's';
    }
    out << '\n';
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t d = 0; d < x.cols(); ++d) {
            out << (d ? "," : "") << csv::format_double(x(r, d));
        }
        first = x.cols() == 0;
        if (y) {
            out << (first ? "" : ",") << (*y)[r];
            first = false;
        }
        if (s) {
            out << (first ? "" : ",") << (*s)[r];
        }
        out << '\n';
    }
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    return out;
}

} // namespace

LabeledDataset load_csv(const std::filesystem::path& path) {
    auto parsed = parse_table(csv::read(path), path);
    if (!parsed.y) {
        throw FormatError(path.string() + ": missing required column 'y'");
    }
    LabeledDataset out{std::move(parsed.x), std::move(*parsed.y)};
    out.validate();
    return out;
}

PUDataset load_pu_csv(const std::filesystem::path& path, std::optional<double> pi,
                      Scenario scenario) {
    auto parsed = parse_table(csv::read(path), path);
    if (!parsed.s) {
        throw FormatError(path.string() + ": missing required column 's'");
    }
    PUDataset out;
    out.x = std::move(parsed.x);
    out.s = std::move(*parsed.s);
    out.y_true = std::move(parsed.y);
    out.scenario = scenario;
    if (pi) {
        out.pi = *pi;
        out.pi_source = PriorSource::user_supplied;
    } else if (out.y_true) {
        out.pi = LabeledDataset{Matrix(), *out.y_true}.empirical_prior();
        out.pi_source = PriorSource::empirical;
    } else {
        throw ParameterError(path.string() + ": no 'y' column, so the class prior must be given");
    }
    const std::size_t n = out.s.size();
    out.c = 0.0;
    if (out.y_true) {
        const auto pos = std::count(out.y_true->begin(), out.y_true->end(), 1);
        if (pos > 0) {
            out.c = static_cast<double>(out.labeled_count()) / static_cast<double>(pos);
        }
    } else if (n > 0) {
        out.c = std::min(1.0, static_cast<double>(out.labeled_count()) / (out.pi * double(n)));
    }
    out.validate();
    return out;
}

void save_csv(const LabeledDataset& dataset, const std::filesystem::path& path) {
    dataset.validate();
    auto out = open_for_write(path);
    write_rows(out, dataset.x, &dataset.y, nullptr);
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

void save_csv(const PUDataset& dataset, const std::filesystem::path& path) {
    if (dataset.s.size() != dataset.x.rows()) {
        throw ShapeError("save_csv: s length differs from x rows");
    }
    auto out = open_for_write(path);
    write_rows(out, dataset.x, dataset.y_true ? &*dataset.y_true : nullptr, &dataset.s);
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_indices(std::size_t n, double train_fraction, Rng& rng) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ParameterError("train_test_split: train_fraction must lie in (0,1)");
    }
    if (n < 2) {
        throw ParameterError("train_test_split: need at least 2 rows");
    }
    auto n_train = static_cast<std::size_t>(std::floor(double(n) * train_fraction + 0.5));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    auto perm = rng.permutation(n);
    std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<long>(n_train));
    std::vector<std::size_t> test(perm.begin() + static_cast<long>(n_train), perm.end());
    return {std::move(train), std::move(test)};
}

LabeledDataset subset(const LabeledDataset& dataset, std::span<const std::size_t> indices) {
    LabeledDataset out{dataset.x.select_rows(indices), std::vector<int>(indices.size())};
    for (std::size_t i = 0; i < indices.size(); ++i) {
        out.y[i] = dataset.y[indices[i]];
    }
    return out;
}

std::pair<LabeledDataset, LabeledDataset> train_test_split(const LabeledDataset& dataset,
                                                           const SplitSpec& spec, Rng& rng) {
    dataset.validate();
    auto [train, test] = split_indices(dataset.size(), spec.train_fraction, rng);
    return {subset(dataset, train), subset(dataset, test)};
}

} // namespace pusc
