#pragma once

#include <cstddef>
#include <span>

namespace pusc {

/// Binary confusion counts with +1 as the positive class.
struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const noexcept { return tp + fp + tn + fn; }
};

ConfusionCounts confusion(std::span<const int> predicted, std::span<const int> actual);

/// All four scores are percentages in [0, 100]. A zero denominator gives 0.
struct Scores {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

Scores scores(const ConfusionCounts& c) noexcept;

/// Score of the scenario-appropriate method minus the ill-specified one.
constexpr double delta(double correct_method_score, double ill_specified_score) noexcept {
    return correct_method_score - ill_specified_score;
}

} // namespace pusc
