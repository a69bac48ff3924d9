#pragma once

#include "pusc/datasets.hpp"

#include <cstdint>
#include <optional>

namespace pusc {

/// Single-sample labeling: draw n rows, then label each positive with
/// probability c.
struct ScarConfig {
    double c = 0.5;
    std::size_t n = 1000;
    std::uint64_t seed = 0;
    /// Draw rows with replacement (natural for synthetic sources).
    bool with_replacement = false;
    /// Known class prior; the source's empirical fraction when unset.
    std::optional<double> pi;
};

/// Two independent draws: labeled positives and an unlabeled sample of the
/// whole population, sized so the total is n.
struct CaseControlConfig {
    double c = 0.5;
    double pi = 0.5;
    std::size_t n = 1000;
    std::uint64_t seed = 0;
};

struct CaseControlSizes {
    double inflation = 1.0; ///< A = 1 / (1 − c(1 − π))
    std::size_t labeled = 0;
    std::size_t unlabeled = 0;
};

/// labeled = round-half-even(A·c·π·n), unlabeled = n − labeled.
CaseControlSizes case_control_sizes(double c, double pi, std::size_t n);

PUDataset scar_label(const LabeledDataset& source, const ScarConfig& cfg, Rng& rng);
PUDataset scar_label(const LabeledDataset& source, const ScarConfig& cfg);

/// Rows in the two parts may coincide. Each part is drawn without
/// replacement when its pool is large enough, with replacement otherwise.
PUDataset case_control_sample(const LabeledDataset& source, const CaseControlConfig& cfg, Rng& rng);
PUDataset case_control_sample(const LabeledDataset& source, const CaseControlConfig& cfg);

/// Probability that an unlabeled single-sample row is positive: π(1−c)/(1−πc).
double unlabeled_positive_fraction_ss(double pi, double c);

struct MixtureWeights {
    double positive;
    double negative;
};

/// Mixture weights of P(X | S=−1) over the class conditionals.
MixtureWeights ss_unlabeled_mixture_weights(double pi, double c);

} // namespace pusc
