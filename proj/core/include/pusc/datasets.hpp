#pragma once

#include "pusc/numerics.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace pusc {

/// How a PU sample was produced.
enum class Scenario { single_sample, case_control };

std::string_view to_string(Scenario s) noexcept;
/// Accepts "ss"/"single_sample" and "cc"/"case_control".
Scenario parse_scenario(std::string_view text);

/// Where a dataset's class prior came from.
enum class PriorSource { configured, user_supplied, empirical };

std::string_view to_string(PriorSource p) noexcept;

/// Fully labeled data: features x (n × d) and labels y ∈ {−1, +1}.
struct LabeledDataset {
    Matrix x;
    std::vector<int> y;

    std::size_t size() const noexcept { return y.size(); }
    std::size_t dim() const noexcept { return x.cols(); }

    /// Fraction of rows with y = +1; 0 for an empty set.
    double empirical_prior() const noexcept;

    /// Throws ShapeError/FormatError if y and x disagree or labels are not ±1.
    void validate() const;
};

/// Positive-unlabeled data. y_true is carried for evaluation only and never
/// reaches the trainer's risk computation.
struct PUDataset {
    Matrix x;
    std::vector<int> s;
    std::optional<std::vector<int>> y_true;
    double pi = 0.5;
    Scenario scenario = Scenario::single_sample;
    double c = 0.0;
    PriorSource pi_source = PriorSource::configured;

    std::size_t size() const noexcept { return s.size(); }
    std::size_t labeled_count() const noexcept;

    /// Checks shapes, label values, pi ∈ (0,1) and that no row has s=+1 with y_true=−1.
    void validate() const;
};

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
};

struct GaussianMixtureSpec {
    double pi = 0.5;
    double mu_pos = 2.0;
    double mu_neg = -2.0;
    double sd = 1.0;
    std::size_t dim = 1;
};

/// Each row is positive with probability pi; features are isotropic normal
/// around mu_pos·1 or mu_neg·1.
LabeledDataset gaussian_mixture(std::size_t n, const GaussianMixtureSpec& spec, Rng& rng);

/// Bayes-optimal accuracy of the isotropic two-Gaussian family, used as an
/// oracle for classifier quality.
double gaussian_mixture_bayes_accuracy(const GaussianMixtureSpec& spec);

LabeledDataset load_csv(const std::filesystem::path& path);

/// Reads a PU CSV (requires an `s` column; `y` optional). The prior is
/// `pi` when given, otherwise the empirical fraction of y=+1 (requires y).
PUDataset load_pu_csv(const std::filesystem::path& path, std::optional<double> pi,
                      Scenario scenario = Scenario::single_sample);

void save_csv(const LabeledDataset& dataset, const std::filesystem::path& path);
void save_csv(const PUDataset& dataset, const std::filesystem::path& path);

/// Random disjoint partition into (train, test). The training side gets
/// round(n·f) rows (ties go to training), clamped so that both sides keep
/// at least one row.
std::pair<LabeledDataset, LabeledDataset> train_test_split(const LabeledDataset& dataset,
                                                           const SplitSpec& spec, Rng& rng);

/// Index form of train_test_split, exposed for tests.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_indices(std::size_t n, double train_fraction, Rng& rng);

LabeledDataset subset(const LabeledDataset& dataset, std::span<const std::size_t> indices);

} // namespace pusc
