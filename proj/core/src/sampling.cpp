#include "pusc/sampling.hpp"

#include "pusc/errors.hpp"

#include <cmath>
#include <string>
#include <unordered_set>

namespace pusc {

namespace {

void check_mixture_args(double pi, double c) {
    if (!(pi > 0.0 && pi < 1.0)) {
        throw ParameterError("pi must lie in (0,1)");
    }
    if (!(c >= 0.0 && c <= 1.0)) {
        throw ParameterError("c must lie in [0,1]");
    }
    if (pi * c >= 1.0) {
        throw ParameterError("pi*c must be below 1");
    }
}

/// k indices from [0, pool): a partial Fisher-Yates shuffle without
/// replacement when k <= pool, independent uniform draws otherwise.
std::vector<std::size_t> draw_indices(std::size_t pool, std::size_t k, bool replacement, Rng& rng) {
    std::vector<std::size_t> out;
    out.reserve(k);
    if (replacement || k > pool) {
        for (std::size_t i = 0; i < k; ++i) {
            out.push_back(static_cast<std::size_t>(rng.below(pool)));
        }
        return out;
    }
    if (2 * k <= pool) {
        // Sparse draw: rejection keeps the cost O(k) for large pools.
        std::unordered_set<std::size_t> seen;
        seen.reserve(2 * k);
        while (out.size() < k) {
            const auto idx = static_cast<std::size_t>(rng.below(pool));
            if (seen.insert(idx).second) {
                out.push_back(idx);
            }
        }
        return out;
    }
    std::vector<std::size_t> perm(pool);
    for (std::size_t i = 0; i < pool; ++i) {
        perm[i] = i;
    }
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(pool - i));
        std::swap(perm[i], perm[j]);
        out.push_back(perm[i]);
    }
    return out;
}

} // namespace

double unlabeled_positive_fraction_ss(double pi, double c) {
    check_mixture_args(pi, c);
    return pi * (1.0 - c) / (1.0 - pi * c);
}

MixtureWeights ss_unlabeled_mixture_weights(double pi, double c) {
    check_mixture_args(pi, c);
    const double denom = 1.0 - pi * c;
    return {(pi - pi * c) / denom, (1.0 - pi) / denom};
}

CaseControlSizes case_control_sizes(double c, double pi, std::size_t n) {
    if (!(pi > 0.0 && pi < 1.0)) {
        throw ParameterError("case-control: pi must lie in (0,1)");
    }
    if (!(c >= 0.0 && c < 1.0)) {
        throw ParameterError("case-control: c must lie in [0,1); at c=1 the unlabeled part is empty");
    }
    CaseControlSizes sizes;
    sizes.inflation = 1.0 / (1.0 - c * (1.0 - pi));
    // nearbyint honours the default round-to-nearest-even mode.
    const double labeled = std::nearbyint(sizes.inflation * c * pi * double(n));
    sizes.labeled = std::min(n, static_cast<std::size_t>(labeled));
    sizes.unlabeled = n - sizes.labeled;
    return sizes;
}

PUDataset scar_label(const LabeledDataset& source, const ScarConfig& cfg, Rng& rng) {
    source.validate();
    if (!(cfg.c >= 0.0 && cfg.c <= 1.0)) {
        throw ParameterError("scar_label: c must lie in [0,1]");
    }
    if (cfg.n == 0) {
        throw ParameterError("scar_label: n must be at least 1");
    }
    if (source.size() == 0) {
        throw DataError("scar_label: source is empty");
    }
    if (!cfg.with_replacement && cfg.n > source.size()) {
        throw ParameterError("scar_label: n=" + std::to_string(cfg.n) + " exceeds source size " +
                             std::to_string(source.size()) + " without replacement");
    }
    const auto rows = draw_indices(source.size(), cfg.n, cfg.with_replacement, rng);

    PUDataset out;
    out.x = source.x.select_rows(rows);
    out.s.assign(cfg.n, -1);
    out.y_true.emplace(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        const int y = source.y[rows[i]];
        (*out.y_true)[i] = y;
        // The coin is flipped for every row so the stream does not depend on labels.
        const bool selected = rng.uniform() < cfg.c;
        if (y == 1 && selected) {
            out.s[i] = 1;
        }
    }
    out.scenario = Scenario::single_sample;
    out.c = cfg.c;
    if (cfg.pi) {
        out.pi = *cfg.pi;
        out.pi_source = PriorSource::configured;
    } else {
        out.pi = source.empirical_prior();
        out.pi_source = PriorSource::empirical;
    }
    if (!(out.pi > 0.0 && out.pi < 1.0)) {
        throw DataError("scar_label: class prior must lie in (0,1); source has a single class");
    }
    return out;
}

PUDataset scar_label(const LabeledDataset& source, const ScarConfig& cfg) {
    Rng rng(cfg.seed);
    return scar_label(source, cfg, rng);
}

PUDataset case_control_sample(const LabeledDataset& source, const CaseControlConfig& cfg, Rng& rng) {
    source.validate();
    const auto sizes = case_control_sizes(cfg.c, cfg.pi, cfg.n);
    std::vector<std::size_t> positives;
    for (std::size_t i = 0; i < source.size(); ++i) {
        if (source.y[i] == 1) {
            positives.push_back(i);
        }
    }
    if (positives.empty()) {
        throw DataError("case_control_sample: source has no positive rows");
    }
    std::vector<std::size_t> rows;
    rows.reserve(cfg.n);
    for (std::size_t k : draw_indices(positives.size(), sizes.labeled, false, rng)) {
        rows.push_back(positives[k]);
    }
    for (std::size_t k : draw_indices(source.size(), sizes.unlabeled, false, rng)) {
        rows.push_back(k);
    }

    PUDataset out;
    out.x = source.x.select_rows(rows);
    out.s.assign(rows.size(), -1);
    std::fill(out.s.begin(), out.s.begin() + static_cast<long>(sizes.labeled), 1);
    out.y_true.emplace(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        (*out.y_true)[i] = source.y[rows[i]];
    }
    out.pi = cfg.pi;
    out.pi_source = PriorSource::configured;
    out.scenario = Scenario::case_control;
    out.c = cfg.c;
    return out;
}

PUDataset case_control_sample(const LabeledDataset& source, const CaseControlConfig& cfg) {
    Rng rng(cfg.seed);
    return case_control_sample(source, cfg, rng);
}

} // namespace pusc
