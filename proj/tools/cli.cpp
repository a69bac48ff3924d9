#include "cli.hpp"

#include "pusc/errors.hpp"
#include "pusc/harness.hpp"
#include "pusc/sampling.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <ostream>

namespace pusc::cli {

namespace {

struct SynthArgs {
    std::size_t n = 1000;
    GaussianMixtureSpec mix;
    std::uint64_t seed = 0;
    std::string out;
};

struct SampleArgs {
    std::string scenario = "ss";
    double c = 0.5;
    std::uint64_t seed = 0;
    std::optional<std::size_t> n;
    std::optional<double> pi;
    bool with_replacement = false;
    std::string in;
    std::string out;
};

struct TrainArgs {
    std::string in;
    std::string test;
    std::optional<double> pi;
    std::string scenario = "ss";
    std::string method = "nnpu_ss";
    std::string optimizer = "sgd";
    std::string loss = "logistic";
    std::string activation = "relu";
    std::vector<std::size_t> hidden{32, 32, 32, 32};
    TrainerConfig trainer;
    std::string model_out;
    std::string trace_out;
};

struct GridArgs {
    std::string config;
    std::string results;
    std::optional<std::size_t> threads;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> n;
    std::vector<std::uint64_t> seeds;
    std::string trace_dir;
    bool dry_run = false;
};

struct ReportArgs {
    std::string results;
    std::string metric = "f1";
    std::string scenario = "all";
    std::string out;
};

int run_synth(const SynthArgs& a, std::ostream& out) {
    Rng rng(a.seed);
    const LabeledDataset data = gaussian_mixture(a.n, a.mix, rng);
    save_csv(data, a.out);
    out << "wrote " << data.size() << " rows (" << data.dim() << " features) to " << a.out
        << "\n";
    return 0;
}

int run_sample(const SampleArgs& a, std::ostream& out) {
    const LabeledDataset source = load_csv(a.in);
    const Scenario scenario = parse_scenario(a.scenario);
    PUDataset pu;
    if (scenario == Scenario::single_sample) {
        ScarConfig cfg;
        cfg.c = a.c;
        cfg.n = a.n.value_or(source.size());
        cfg.seed = a.seed;
        cfg.with_replacement = a.with_replacement;
        cfg.pi = a.pi;
        pu = scar_label(source, cfg);
    } else {
        CaseControlConfig cfg;
        cfg.c = a.c;
        cfg.pi = a.pi.value_or(source.empirical_prior());
        cfg.n = a.n.value_or(source.size());
        cfg.seed = a.seed;
        pu = case_control_sample(source, cfg);
    }
    save_csv(pu, a.out);
    out << "wrote " << pu.size() << " rows (" << pu.labeled_count() << " labeled, pi "
        << pu.pi << ") to " << a.out << "\n";
    return 0;
}

int run_train(TrainArgs a, std::ostream& out) {
    const PUDataset pu = load_pu_csv(a.in, a.pi, parse_scenario(a.scenario));
    a.trainer.method = parse_method(a.method);
    a.trainer.optimizer = parse_optimizer(a.optimizer);
    a.trainer.loss = parse_loss(a.loss);
    std::optional<LabeledDataset> test;
    if (!a.test.empty()) {
        test = load_csv(a.test);
    }
    std::vector<std::size_t> dims{pu.x.cols()};
    dims.insert(dims.end(), a.hidden.begin(), a.hidden.end());
    dims.push_back(1);
    Rng init_rng = Rng(a.trainer.seed).child(0);
    MLPModel model = MLPModel::init(dims, parse_activation(a.activation), init_rng);
    a.trainer.batch_size = std::min(a.trainer.batch_size, pu.size());
    const TrainResult result = train(pu, a.trainer, std::move(model), test ? &*test : nullptr);

    if (!result.trace.empty()) {
        const EpochTrace& last = result.trace.back();
        out << "epochs " << result.trace.size() << ", final objective " << last.mean_objective
            << ", truncation fraction " << last.truncation_fraction << "\n";
    }
    if (test) {
        const auto pred = classify_scores(result.model.forward(test->x));
        const Scores s = scores(confusion(pred, test->y));
        out << "test accuracy " << s.accuracy << ", precision " << s.precision << ", recall "
            << s.recall << ", f1 " << s.f1 << "\n";
    }
    if (!a.model_out.empty()) {
        save_model(result.model, a.model_out);
    }
    if (!a.trace_out.empty()) {
        save_trace_csv(result.trace, a.trace_out);
    }
    return 0;
}

int run_grid_cmd(const GridArgs& a, std::ostream& out) {
    GridSpec spec = load_grid_spec(a.config);
    // Relative CSV paths resolve against the manifest's directory.
    const auto base = std::filesystem::path(a.config).parent_path();
    for (auto& d : spec.datasets) {
        if (auto* cs = std::get_if<CsvSource>(&d.source); cs && cs->path.is_relative()) {
            cs->path = base / cs->path;
        }
    }
    if (a.threads) spec.threads = *a.threads;
    if (a.epochs) spec.trainer.epochs = *a.epochs;
    if (a.n) spec.n = *a.n;
    if (!a.seeds.empty()) spec.seeds = a.seeds;
    if (!a.trace_dir.empty()) spec.trace_dir = a.trace_dir;
    spec.validate();
    if (a.dry_run) {
        out << grid_spec_to_json(spec) << "\n" << spec.cell_count() << " cells\n";
        return 0;
    }
    const auto results = run_grid(spec, a.results);
    const auto failed = std::count_if(results.begin(), results.end(),
                                      [](const ExperimentResult& r) { return !r.ok(); });
    out << results.size() << " cells, " << failed << " failed; results in " << a.results << "\n";
    return failed == 0 ? 0 : 1;
}

int run_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
    const auto results = load_results(a.results);
    const ReportMetric metric = parse_report_metric(a.metric);
    std::vector<Scenario> scenarios;
    if (a.scenario == "all") {
        scenarios = {Scenario::single_sample, Scenario::case_control};
    } else {
        scenarios = {parse_scenario(a.scenario)};
    }
    std::string text;
    for (Scenario s : scenarios) {
        const Report r = emit_report(results, metric, s);
        if (!text.empty()) text += "\n";
        text += r.text;
        for (const auto& w : r.warnings) {
            err << "warning: " << w << "\n";
        }
    }
    if (a.out.empty()) {
        out << text;
    } else {
        std::ofstream f(a.out);
        if (!f) throw IoError("cannot open " + a.out);
        f << text;
    }
    return 0;
}

int run_check(std::uint64_t seed, std::ostream& out) {
    const auto checks = run_self_checks(seed);
    std::size_t passed = 0;
    for (const auto& c : checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
        passed += c.passed;
    }
    out << passed << "/" << checks.size() << " checks passed\n";
    return passed == checks.size() ? 0 : 1;
}

} // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Positive-unlabeled learning under single-sample and case-control sampling",
                 "pusc"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Draw a labeled two-Gaussian dataset");
    synth_cmd->add_option("--n", synth.n, "Number of rows")->capture_default_str();
    synth_cmd->add_option("--pi", synth.mix.pi, "Class prior P(y=+1)")->capture_default_str();
    synth_cmd->add_option("--mu-pos", synth.mix.mu_pos, "Positive-class mean")->capture_default_str();
    synth_cmd->add_option("--mu-neg", synth.mix.mu_neg, "Negative-class mean")->capture_default_str();
    synth_cmd->add_option("--sd", synth.mix.sd, "Per-coordinate standard deviation")->capture_default_str();
    synth_cmd->add_option("--dim", synth.mix.dim, "Feature dimension")->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
    synth_cmd->add_option("--out", synth.out, "Output CSV")->required();

    SampleArgs sample;
    auto* sample_cmd = app.add_subcommand("sample", "PU-sample a labeled CSV");
    sample_cmd->add_option("--in", sample.in, "Labeled input CSV (features, y)")->required();
    sample_cmd->add_option("--out", sample.out, "Output PU CSV (features, y, s)")->required();
    sample_cmd->add_option("--scenario", sample.scenario, "ss or cc")->capture_default_str();
    sample_cmd->add_option("--c", sample.c, "Label frequency P(s=1|y=1)")->capture_default_str();
    sample_cmd->add_option("--seed", sample.seed, "Random seed")->capture_default_str();
    sample_cmd->add_option("--n", sample.n, "Rows to draw (default: input size)");
    sample_cmd->add_option("--pi", sample.pi, "Class prior (default: empirical)");
    sample_cmd->add_flag("--with-replacement", sample.with_replacement,
                         "Single-sample only: draw rows with replacement");

    TrainArgs tr;
    auto* train_cmd = app.add_subcommand("train", "Train one classifier on a PU CSV");
    train_cmd->add_option("--in", tr.in, "PU CSV (features, s, optional y)")->required();
    train_cmd->add_option("--test", tr.test, "Labeled CSV to score after training");
    train_cmd->add_option("--pi", tr.pi, "Class prior (default: empirical from y)");
    train_cmd->add_option("--scenario", tr.scenario, "Scenario recorded for the data")->capture_default_str();
    train_cmd->add_option("--method", tr.method, "nnpu_ss, nnpu_cc, upu_ss or upu_cc")->capture_default_str();
    train_cmd->add_option("--hidden", tr.hidden, "Hidden widths, comma separated")
        ->delimiter(',')
        ->capture_default_str();
    train_cmd->add_option("--activation", tr.activation, "relu or tanh")->capture_default_str();
    train_cmd->add_option("--epochs", tr.trainer.epochs, "Epochs")->capture_default_str();
    train_cmd->add_option("--batch-size", tr.trainer.batch_size, "Minibatch size")->capture_default_str();
    train_cmd->add_option("--eta", tr.trainer.eta, "Step size")->capture_default_str();
    train_cmd->add_option("--beta", tr.trainer.beta, "Truncation threshold")->capture_default_str();
    train_cmd->add_option("--gamma", tr.trainer.gamma, "Surrogate step multiplier")->capture_default_str();
    train_cmd->add_option("--optimizer", tr.optimizer, "sgd or adam")->capture_default_str();
    train_cmd->add_option("--loss", tr.loss, "logistic or sigmoid")->capture_default_str();
    train_cmd->add_option("--seed", tr.trainer.seed, "Seed for initialisation and shuffling")->capture_default_str();
    train_cmd->add_option("--model-out", tr.model_out, "Write the trained model as JSON");
    train_cmd->add_option("--trace-out", tr.trace_out, "Write the per-epoch trace CSV");

    GridArgs grid;
    auto* grid_cmd = app.add_subcommand("grid", "Run a dataset x scenario x method x c x seed grid");
    grid_cmd->add_option("--config", grid.config, "JSON grid manifest")->required();
    grid_cmd->add_option("--results", grid.results, "Results CSV (appended, resumable)");
    grid_cmd->add_option("--threads", grid.threads, "Cells run concurrently");
    grid_cmd->add_option("--epochs", grid.epochs, "Override trainer.epochs");
    grid_cmd->add_option("--n", grid.n, "Override the PU sample size");
    grid_cmd->add_option("--seeds", grid.seeds, "Override the seed list, comma separated")
        ->delimiter(',');
    grid_cmd->add_option("--trace-dir", grid.trace_dir, "Write per-cell traces here");
    grid_cmd->add_flag("--dry-run", grid.dry_run, "Print the resolved manifest and cell count");

    ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "Summarise a results CSV as Δ tables");
    report_cmd->add_option("--results", report.results, "Results CSV")->required();
    report_cmd->add_option("--metric", report.metric, "accuracy, precision, recall or f1")->capture_default_str();
    report_cmd->add_option("--scenario", report.scenario, "ss, cc or all")->capture_default_str();
    report_cmd->add_option("--out", report.out, "Write the table here instead of stdout");

    std::uint64_t check_seed = 2024;
    auto* check_cmd = app.add_subcommand("check", "Run the built-in identity and oracle checks");
    check_cmd->add_option("--seed", check_seed, "Seed for the random batches")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help()
                                               : app.get_subcommands().front()->help());
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return 2;
    }

    try {
        if (grid_cmd->parsed() && !grid.dry_run && grid.results.empty()) {
            err << "error: grid: --results is required unless --dry-run is given\n";
            return 2;
        }
        if (synth_cmd->parsed()) return run_synth(synth, out);
        if (sample_cmd->parsed()) return run_sample(sample, out);
        if (train_cmd->parsed()) return run_train(tr, out);
        if (grid_cmd->parsed()) return run_grid_cmd(grid, out);
        if (report_cmd->parsed()) return run_report(report, out, err);
        if (check_cmd->parsed()) return run_check(check_seed, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace pusc::cli
