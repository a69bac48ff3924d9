#include "pusc/metrics.hpp"

#include "pusc/errors.hpp"

namespace pusc {

ConfusionCounts confusion(std::span<const int> predicted, std::span<const int> actual) {
    if (predicted.size() != actual.size()) {
        throw ShapeError("confusion: predicted and actual differ in length");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool p = predicted[i] == 1;
        const bool a = actual[i] == 1;
        if (p && a) {
            ++c.tp;
        } else if (p) {
            ++c.fp;
        } else if (a) {
            ++c.fn;
        } else {
            ++c.tn;
        }
    }
    return c;
}

Scores scores(const ConfusionCounts& c) noexcept {
    auto ratio = [](std::size_t num, std::size_t den) {
        return den == 0 ? 0.0 : 100.0 * double(num) / double(den);
    };
    Scores s;
    s.accuracy = ratio(c.tp + c.tn, c.total());
    s.precision = ratio(c.tp, c.tp + c.fp);
    s.recall = ratio(c.tp, c.tp + c.fn);
    // 2pr/(p+r) simplifies to 2tp/(2tp+fp+fn).
    s.f1 = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
    return s;
}

} // namespace pusc
