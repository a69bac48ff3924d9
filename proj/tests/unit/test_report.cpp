#include "pusc/errors.hpp"
#include "pusc/harness.hpp"

#include "support.hpp"

#include <sstream>

using namespace pusc;

namespace {

ExperimentResult row(const std::string& ds, Scenario sc, Method m, double c, std::uint64_t seed,
                     double f1) {
    ExperimentResult r;
    r.dataset = ds;
    r.scenario = sc;
    r.method = m;
    r.c = c;
    r.seed = seed;
    r.metrics = {f1 + 1.0, f1, f1, f1};
    return r;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::vector<std::string> cells_of(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (std::size_t i = 1; i < line.size(); ++i) {
        if (line[i] == '|') {
            const auto b = cur.find_first_not_of(' ');
            out.push_back(b == std::string::npos ? "" : cur.substr(b, cur.find_last_not_of(' ') - b + 1));
            cur.clear();
        } else {
            cur += line[i];
        }
    }
    return out;
}

} // namespace

TEST(Report, BlockLayoutAndDelta) {
    const auto ss = Scenario::single_sample;
    std::vector<ExperimentResult> rs{
        row("digits", ss, Method::nnpu_ss, 0.9, 0, 99.0), row("digits", ss, Method::nnpu_ss, 0.9, 1, 99.42),
        row("digits", ss, Method::nnpu_cc, 0.9, 0, 75.0), row("digits", ss, Method::nnpu_cc, 0.9, 1, 76.88),
        row("digits", Scenario::case_control, Method::nnpu_cc, 0.9, 0, 10.0)};
    const auto rep = emit_report(rs, ReportMetric::f1, ss);
    EXPECT_TRUE(rep.warnings.empty());
    const auto ls = lines_of(rep.text);
    ASSERT_EQ(ls.size(), 7u);
    EXPECT_EQ(ls[0], "Scenario: ss, metric: f1");
    EXPECT_EQ(ls[2], "| c | Model | digits |");
    EXPECT_EQ(ls[3], "|---|---|---|");
    EXPECT_EQ(ls[4], "| 0.9 | nnPUcc | 75.94 |");
    EXPECT_EQ(ls[5], "|  | nnPUss | 99.21 |");
    EXPECT_EQ(ls[6], "|  | Δ | 23.27 |");
}

TEST(Report, DeltaMatchesMeanRowsAcrossGrid) {
    std::vector<ExperimentResult> rs;
    Rng rng(3);
    for (auto sc : {Scenario::single_sample, Scenario::case_control})
        for (auto m : {Method::nnpu_ss, Method::nnpu_cc, Method::upu_ss, Method::upu_cc})
            for (double c : {0.1, 0.5})
                for (const char* ds : {"a", "b"})
                    for (std::uint64_t s = 0; s < 4; ++s)
                        rs.push_back(row(ds, sc, m, c, s, 100.0 * rng.uniform()));
    for (auto sc : {Scenario::single_sample, Scenario::case_control}) {
        const auto rep = emit_report(rs, ReportMetric::f1, sc);
        EXPECT_TRUE(rep.warnings.empty());
        const auto ls = lines_of(rep.text);
        ASSERT_EQ(ls.size(), 4u + 2 * 6);
        for (std::size_t i = 4; i < ls.size(); i += 3) {
            const auto ill = cells_of(ls[i]);
            const auto ok = cells_of(ls[i + 1]);
            const auto d = cells_of(ls[i + 2]);
            ASSERT_EQ(d[1], "Δ");
            for (std::size_t k = 2; k < d.size(); ++k) {
                EXPECT_NEAR(std::stod(d[k]), std::stod(ok[k]) - std::stod(ill[k]), 0.01 + 1e-12);
            }
            // recompute the correct-method mean from raw rows
            const std::string label = ok[1];
            const double c = i < 10 ? 0.1 : 0.5;
            double sum = 0.0;
            int n = 0;
            for (const auto& r : rs)
                if (r.scenario == sc && r.dataset == "a" && r.c == c && method_label(r.method) == label) {
                    sum += r.metrics.f1;
                    ++n;
                }
            EXPECT_NEAR(std::stod(ok[2]), sum / n, 0.005 + 1e-12);
        }
    }
}

TEST(Report, MethodOrderFollowsScenario) {
    std::vector<ExperimentResult> rs;
    for (auto m : {Method::nnpu_ss, Method::nnpu_cc, Method::upu_ss, Method::upu_cc})
        rs.push_back(row("d", Scenario::case_control, m, 0.5, 0, 50.0));
    const auto ls = lines_of(emit_report(rs, ReportMetric::accuracy, Scenario::case_control).text);
    ASSERT_EQ(ls.size(), 10u);
    EXPECT_EQ(ls[0], "Scenario: cc, metric: accuracy");
    EXPECT_EQ(cells_of(ls[4])[1], "nnPUss");
    EXPECT_EQ(cells_of(ls[5])[1], "nnPUcc");
    EXPECT_EQ(cells_of(ls[7])[1], "uPUss");
    EXPECT_EQ(cells_of(ls[8])[1], "uPUcc");
    EXPECT_EQ(cells_of(ls[4])[2], "51.00");
}

TEST(Report, EmptyResultsGiveHeaderAndWarning) {
    const auto rep = emit_report(std::vector<ExperimentResult>{}, ReportMetric::f1,
                                 Scenario::single_sample);
    EXPECT_EQ(lines_of(rep.text).size(), 4u);
    ASSERT_EQ(rep.warnings.size(), 1u);
    EXPECT_NE(rep.warnings[0].find("no results"), std::string::npos);
}

TEST(Report, MissingAndFailedCellsAreBlankWithWarnings) {
    const auto ss = Scenario::single_sample;
    std::vector<ExperimentResult> rs{row("a", ss, Method::nnpu_ss, 0.5, 0, 90.0),
                                     row("a", ss, Method::nnpu_cc, 0.5, 0, 80.0),
                                     row("b", ss, Method::nnpu_ss, 0.5, 0, 70.0)};
    auto failed = row("b", ss, Method::nnpu_cc, 0.5, 0, 0.0);
    failed.error = "diverged";
    rs.push_back(failed);
    const auto rep = emit_report(rs, ReportMetric::f1, ss);
    const auto ls = lines_of(rep.text);
    ASSERT_EQ(ls.size(), 7u);
    EXPECT_EQ(ls[4], "| 0.5 | nnPUcc | 80.00 |  |");
    EXPECT_EQ(ls[6], "|  | Δ | 10.00 |  |");
    ASSERT_EQ(rep.warnings.size(), 2u);
    EXPECT_NE(rep.warnings[0].find("failed"), std::string::npos);
    EXPECT_NE(rep.warnings[1].find("missing cell: b nnPUcc"), std::string::npos);
}

TEST(Report, LoneMethodHasNoDeltaRow) {
    std::vector<ExperimentResult> rs{row("a", Scenario::single_sample, Method::upu_ss, 0.3, 0, 60.0)};
    const auto rep = emit_report(rs, ReportMetric::f1, Scenario::single_sample);
    EXPECT_EQ(lines_of(rep.text).size(), 5u);
    ASSERT_EQ(rep.warnings.size(), 1u);
    EXPECT_NE(rep.warnings[0].find("uPUcc"), std::string::npos);
}

TEST(Report, FromFileAndMetricParsing) {
    test::TempDir dir;
    auto r = row("a", Scenario::single_sample, Method::nnpu_ss, 0.1, 0, 42.0);
    test::write_file(dir / "r.csv", std::string(kResultsVersionLine) + "\n" + std::string(kResultsHeader) +
                                        "\n" + format_result_row(r) + "\n");
    const auto rep = emit_report(dir / "r.csv", ReportMetric::accuracy, Scenario::single_sample);
    EXPECT_NE(rep.text.find("| 0.1 | nnPUss | 43.00 |"), std::string::npos);
    EXPECT_EQ(parse_report_metric("recall"), ReportMetric::recall);
    EXPECT_THROW(parse_report_metric("auc"), ParameterError);
}
