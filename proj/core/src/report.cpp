#include "pusc/csv.hpp"
#include "pusc/errors.hpp"
#include "pusc/harness.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace pusc {

std::string_view to_string(ReportMetric m) noexcept {
    switch (m) {
    case ReportMetric::accuracy: return "accuracy";
    case ReportMetric::precision: return "precision";
    case ReportMetric::recall: return "recall";
    case ReportMetric::f1: return "f1";
    }
    return "?";
}

ReportMetric parse_report_metric(std::string_view text) {
    for (ReportMetric m : {ReportMetric::accuracy, ReportMetric::precision, ReportMetric::recall,
                           ReportMetric::f1}) {
        if (text == to_string(m)) {
            return m;
        }
    }
    throw ParameterError("unknown metric '" + std::string(text) +
                         "' (expected accuracy, precision, recall or f1)");
}

double metric_value(const Scores& s, ReportMetric m) noexcept {
    switch (m) {
    case ReportMetric::accuracy: return s.accuracy;
    case ReportMetric::precision: return s.precision;
    case ReportMetric::recall: return s.recall;
    case ReportMetric::f1: return s.f1;
    }
    return 0.0;
}

std::string_view method_label(Method m) noexcept {
    switch (m) {
    case Method::nnpu_ss: return "nnPUss";
    case Method::nnpu_cc: return "nnPUcc";
    case Method::upu_ss: return "uPUss";
    case Method::upu_cc: return "uPUcc";
    }
    return "?";
}

namespace {

struct Mean {
    double sum = 0.0;
    std::size_t count = 0;
    double value() const { return sum / static_cast<double>(count); }
};

// (ill-specified, correct) pairs for a scenario, nnPU family first.
std::vector<std::pair<Method, Method>> method_pairs(Scenario scenario) {
    if (scenario == Scenario::single_sample) {
        return {{Method::nnpu_cc, Method::nnpu_ss}, {Method::upu_cc, Method::upu_ss}};
    }
    return {{Method::nnpu_ss, Method::nnpu_cc}, {Method::upu_ss, Method::upu_cc}};
}

std::string c_text(double c) {
    std::string s = csv::format_fixed(c, 2);
    // 0.10 -> 0.1, keeps 0.25 as is
    while (s.size() > 3 && s.back() == '0') {
        s.pop_back();
    }
    return s;
}

} // namespace

Report emit_report(const std::vector<ExperimentResult>& results, ReportMetric metric,
                   Scenario scenario) {
    Report report;
    std::vector<std::string> datasets;
    std::vector<double> cs;
    std::vector<Method> present;
    std::map<std::tuple<double, Method, std::string>, Mean> means;

    for (const auto& r : results) {
        if (r.scenario != scenario) {
            continue;
        }
        if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) {
            datasets.push_back(r.dataset);
        }
        if (std::find(cs.begin(), cs.end(), r.c) == cs.end()) {
            cs.push_back(r.c);
        }
        if (std::find(present.begin(), present.end(), r.method) == present.end()) {
            present.push_back(r.method);
        }
        if (!r.ok()) {
            report.warnings.push_back("failed cell excluded: " + r.dataset + " " +
                                      std::string(to_string(r.method)) + " c=" + c_text(r.c) +
                                      " seed=" + std::to_string(r.seed));
            continue;
        }
        auto& m = means[{r.c, r.method, r.dataset}];
        m.sum += metric_value(r.metrics, metric);
        ++m.count;
    }
    std::sort(cs.begin(), cs.end());

    std::ostringstream out;
    out << "Scenario: " << to_string(scenario) << ", metric: " << to_string(metric) << "\n\n";
    out << "| c | Model |";
    for (const auto& d : datasets) {
        out << ' ' << d << " |";
    }
    out << "\n|---|---|";
    for (std::size_t i = 0; i < datasets.size(); ++i) {
        out << "---|";
    }
    out << '\n';

    if (results.empty()) {
        report.warnings.push_back("no results to report");
    } else if (datasets.empty()) {
        report.warnings.push_back("no results for scenario " + std::string(to_string(scenario)));
    }

    auto lookup = [&](double c, Method m, const std::string& d) -> std::optional<double> {
        auto it = means.find({c, m, d});
        if (it == means.end() || it->second.count == 0) {
            return std::nullopt;
        }
        return it->second.value();
    };
    auto has = [&](Method m) {
        return std::find(present.begin(), present.end(), m) != present.end();
    };

    for (double c : cs) {
        bool first_row = true;
        auto emit_row = [&](const std::string& label, auto&& cell) {
            out << "| " << (first_row ? c_text(c) : "") << " | " << label << " |";
            first_row = false;
            for (const auto& d : datasets) {
                const std::optional<double> v = cell(d);
                out << ' ' << (v ? csv::format_fixed(*v, 2) : "") << " |";
            }
            out << '\n';
        };
        for (const auto& [ill, correct] : method_pairs(scenario)) {
            const bool has_ill = has(ill);
            const bool has_correct = has(correct);
            if (!has_ill && !has_correct) {
                continue;
            }
            for (Method m : {ill, correct}) {
                if (!has(m)) {
                    continue;
                }
                emit_row(std::string(method_label(m)), [&](const std::string& d) {
                    auto v = lookup(c, m, d);
                    if (!v) {
                        report.warnings.push_back("missing cell: " + d + " " +
                                                  std::string(method_label(m)) + " c=" + c_text(c));
                    }
                    return v;
                });
            }
            if (has_ill && has_correct) {
                emit_row("Δ", [&](const std::string& d) -> std::optional<double> {
                    auto a = lookup(c, correct, d);
                    auto b = lookup(c, ill, d);
                    if (!a || !b) {
                        return std::nullopt;
                    }
                    return delta(*a, *b);
                });
            } else {
                report.warnings.push_back("no Δ row at c=" + c_text(c) + ": " +
                                          std::string(method_label(has_ill ? correct : ill)) +
                                          " has no results");
            }
        }
    }
    report.text = out.str();
    return report;
}

Report emit_report(const std::filesystem::path& results_path, ReportMetric metric,
                   Scenario scenario) {
    return emit_report(load_results(results_path), metric, scenario);
}

} // namespace pusc
