#pragma once

#include "pusc/datasets.hpp"
#include "pusc/metrics.hpp"
#include "pusc/model.hpp"
#include "pusc/trainer.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pusc {

/// Synthetic two-Gaussian pool. Each repetition draws `pool_size` rows,
/// splits them into train/test, and PU-samples n rows from the train side.
struct SyntheticSource {
    GaussianMixtureSpec mixture;
    std::size_t pool_size = 5000;
};

/// User-supplied labeled CSV. The prior is `pi` when given, otherwise the
/// empirical positive fraction of the whole file.
struct CsvSource {
    std::filesystem::path path;
    std::optional<double> pi;
};

struct DatasetSource {
    std::string name;
    std::variant<SyntheticSource, CsvSource> source;
};

struct GridSpec {
    std::vector<DatasetSource> datasets;
    std::vector<Scenario> scenarios{Scenario::single_sample, Scenario::case_control};
    std::vector<Method> methods{Method::nnpu_ss, Method::nnpu_cc};
    std::vector<double> c_values{0.1, 0.3, 0.5, 0.7, 0.9};
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::size_t n = 1000;
    double train_fraction = 0.8;
    TrainerConfig trainer;
    std::vector<std::size_t> hidden{32, 32, 32, 32};
    Activation activation = Activation::relu;
    /// Cells evaluated concurrently; results are still written in grid order.
    std::size_t threads = 1;
    /// When set, every cell writes its per-epoch trace CSV here.
    std::optional<std::filesystem::path> trace_dir;

    void validate() const;
    std::size_t cell_count() const noexcept;
};

/// Parses a JSON grid manifest. Omitted fields keep their defaults.
GridSpec parse_grid_spec(std::string_view json_text);
GridSpec load_grid_spec(const std::filesystem::path& path);
std::string grid_spec_to_json(const GridSpec& spec);

struct GridCell {
    std::size_t dataset_index = 0;
    Scenario scenario = Scenario::single_sample;
    Method method = Method::nnpu_ss;
    double c = 0.0;
    std::uint64_t seed = 0;
};

/// Cells in dataset → scenario → method → c → seed order.
std::vector<GridCell> enumerate_cells(const GridSpec& spec);

/// Seeds for one cell, all derived from FNV-1a/SplitMix64 hashing of a
/// canonical text key:
///   pool   = hash(seed, dataset)                         source draw + split
///   sample = hash(seed, dataset, scenario, c)            PU sampling
///   train  = hash(seed, dataset, scenario, c, "train")   init + shuffling
/// The method is not part of any key, so methods in one cell group are
/// compared on identical data, initialisation and batch order.
struct CellSeeds {
    std::uint64_t pool;
    std::uint64_t sample;
    std::uint64_t train;
};

CellSeeds derive_cell_seeds(std::uint64_t seed, std::string_view dataset, Scenario scenario,
                            double c);

std::uint64_t hash_key(std::string_view key) noexcept;

struct ExperimentResult {
    std::string dataset;
    Scenario scenario = Scenario::single_sample;
    Method method = Method::nnpu_ss;
    double c = 0.0;
    std::uint64_t seed = 0;
    Scores metrics;
    std::optional<std::string> trace_path;
    /// Set for a failed cell; metrics are meaningless then.
    std::optional<std::string> error;

    bool ok() const noexcept { return !error.has_value(); }
};

/// Everything one cell produces, including the trace.
struct CellOutcome {
    ExperimentResult result;
    std::vector<EpochTrace> trace;
    MLPModel model;
};

/// Runs a single cell; throws on failure.
CellOutcome run_cell(const GridSpec& spec, const GridCell& cell);

/// Builds the (train PU sample, test set) pair a cell trains and scores on.
std::pair<PUDataset, LabeledDataset> build_cell_data(const GridSpec& spec, const GridCell& cell);

/// Runs every cell not already present in `results_path` and appends each
/// result as soon as it (and every earlier pending cell) is done. Failed
/// cells are recorded with an error marker and retried on the next run.
/// Returns one result per cell in grid order.
std::vector<ExperimentResult> run_grid(const GridSpec& spec,
                                       const std::filesystem::path& results_path);

/// Results CSV: a version line "# pusc-results v1" followed by
/// dataset,scenario,method,c,seed,accuracy,precision,recall,f1,trace_path.
inline constexpr std::string_view kResultsVersionLine = "# pusc-results v1";
inline constexpr std::string_view kResultsHeader =
    "dataset,scenario,method,c,seed,accuracy,precision,recall,f1,trace_path";

std::string format_result_row(const ExperimentResult& r);
std::vector<ExperimentResult> load_results(const std::filesystem::path& path);

enum class ReportMetric { accuracy, precision, recall, f1 };

std::string_view to_string(ReportMetric m) noexcept;
ReportMetric parse_report_metric(std::string_view text);
double metric_value(const Scores& s, ReportMetric m) noexcept;

struct Report {
    std::string text;
    std::vector<std::string> warnings;
};

/// Markdown table with one block per c: a row per method holding its mean
/// over seeds for each dataset column, then a Δ row (scenario-appropriate
/// minus ill-specified), two decimals throughout.
Report emit_report(const std::vector<ExperimentResult>& results, ReportMetric metric,
                   Scenario scenario);
Report emit_report(const std::filesystem::path& results_path, ReportMetric metric,
                   Scenario scenario);

/// Display label used in reports, e.g. "nnPUss".
std::string_view method_label(Method m) noexcept;

struct CheckOutcome {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Fast identity and oracle checks: the two single-sample risk forms, the
/// logistic identity, gradients of both training branches and sampler
/// proportions.
std::vector<CheckOutcome> run_self_checks(std::uint64_t seed = 2024);

} // namespace pusc
