#include "pusc/harness.hpp"

#include "pusc/csv.hpp"
#include "pusc/errors.hpp"
#include "pusc/sampling.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

namespace pusc {

using nlohmann::json;

namespace {

std::string shortest(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, end);
}

} // namespace

void GridSpec::validate() const {
    if (datasets.empty()) {
        throw ParameterError("grid: at least one dataset is required");
    }
    for (std::size_t i = 0; i < datasets.size(); ++i) {
        const auto& name = datasets[i].name;
        if (name.empty() || name.find_first_of(",\n\r") != std::string::npos) {
            throw ParameterError("grid: dataset names must be non-empty and free of commas");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (datasets[j].name == name) {
                throw ParameterError("grid: duplicate dataset name '" + name + "'");
            }
        }
    }
    if (scenarios.empty() || methods.empty() || c_values.empty() || seeds.empty()) {
        throw ParameterError("grid: scenarios, methods, c_values and seeds must be non-empty");
    }
    const bool has_cc =
        std::find(scenarios.begin(), scenarios.end(), Scenario::case_control) != scenarios.end();
    for (double c : c_values) {
        if (!(c > 0.0 && c <= 1.0)) {
            throw ParameterError("grid: c values must lie in (0,1], got " + shortest(c));
        }
        if (has_cc && c >= 1.0) {
            throw ParameterError("grid: case-control cells need c < 1");
        }
    }
    if (n == 0) {
        throw ParameterError("grid: n must be >= 1");
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ParameterError("grid: train_fraction must lie in (0,1)");
    }
    if (threads == 0) {
        throw ParameterError("grid: threads must be >= 1");
    }
    trainer.validate();
}

std::size_t GridSpec::cell_count() const noexcept {
    return datasets.size() * scenarios.size() * methods.size() * c_values.size() * seeds.size();
}

// ---------------------------------------------------------------------------
// JSON manifest

namespace {

template <typename T>
void read_opt(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) {
        out = obj.at(key).get<T>();
    }
}

} // namespace

GridSpec parse_grid_spec(std::string_view json_text) {
    GridSpec spec;
    try {
        const json doc = json::parse(json_text);
        if (!doc.is_object()) {
            throw FormatError("grid spec: top level must be an object");
        }
        for (auto it = doc.begin(); it != doc.end(); ++it) {
            static const char* kKnown[] = {"datasets", "scenarios", "methods", "c_values",
                                           "seeds",    "n",         "train_fraction",
                                           "trainer",  "model",     "threads",
                                           "trace_dir"};
            if (std::find_if(std::begin(kKnown), std::end(kKnown),
                             [&](const char* k) { return it.key() == k; }) == std::end(kKnown)) {
                throw FormatError("grid spec: unknown field '" + it.key() + "'");
            }
        }
        if (doc.contains("datasets")) {
            for (const auto& d : doc.at("datasets")) {
                DatasetSource src;
                src.name = d.at("name").get<std::string>();
                if (d.contains("csv")) {
                    CsvSource cs;
                    cs.path = d.at("csv").get<std::string>();
                    if (d.contains("pi")) {
                        cs.pi = d.at("pi").get<double>();
                    }
                    src.source = cs;
                } else {
                    SyntheticSource ss;
                    const json syn = d.value("synthetic", json::object());
                    read_opt(syn, "pi", ss.mixture.pi);
                    read_opt(syn, "mu_pos", ss.mixture.mu_pos);
                    read_opt(syn, "mu_neg", ss.mixture.mu_neg);
                    read_opt(syn, "sd", ss.mixture.sd);
                    read_opt(syn, "dim", ss.mixture.dim);
                    read_opt(syn, "pool_size", ss.pool_size);
                    src.source = ss;
                }
                spec.datasets.push_back(std::move(src));
            }
        }
        if (doc.contains("scenarios")) {
            spec.scenarios.clear();
            for (const auto& s : doc.at("scenarios")) {
                spec.scenarios.push_back(parse_scenario(s.get<std::string>()));
            }
        }
        if (doc.contains("methods")) {
            spec.methods.clear();
            for (const auto& m : doc.at("methods")) {
                spec.methods.push_back(parse_method(m.get<std::string>()));
            }
        }
        read_opt(doc, "c_values", spec.c_values);
        read_opt(doc, "seeds", spec.seeds);
        read_opt(doc, "n", spec.n);
        read_opt(doc, "train_fraction", spec.train_fraction);
        read_opt(doc, "threads", spec.threads);
        if (doc.contains("trace_dir")) {
            spec.trace_dir = doc.at("trace_dir").get<std::string>();
        }
        if (doc.contains("trainer")) {
            const auto& t = doc.at("trainer");
            read_opt(t, "beta", spec.trainer.beta);
            read_opt(t, "gamma", spec.trainer.gamma);
            read_opt(t, "eta", spec.trainer.eta);
            read_opt(t, "epochs", spec.trainer.epochs);
            read_opt(t, "batch_size", spec.trainer.batch_size);
            if (t.contains("optimizer")) {
                spec.trainer.optimizer = parse_optimizer(t.at("optimizer").get<std::string>());
            }
            if (t.contains("loss")) {
                spec.trainer.loss = parse_loss(t.at("loss").get<std::string>());
            }
        }
        if (doc.contains("model")) {
            const auto& m = doc.at("model");
            read_opt(m, "hidden", spec.hidden);
            if (m.contains("activation")) {
                spec.activation = parse_activation(m.at("activation").get<std::string>());
            }
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("grid spec: ") + e.what());
    }
    return spec;
}

GridSpec load_grid_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_grid_spec(buf.str());
}

std::string grid_spec_to_json(const GridSpec& spec) {
    json doc;
    auto& ds = doc["datasets"] = json::array();
    for (const auto& d : spec.datasets) {
        json entry{{"name", d.name}};
        if (const auto* syn = std::get_if<SyntheticSource>(&d.source)) {
            entry["synthetic"] = {{"pi", syn->mixture.pi},       {"mu_pos", syn->mixture.mu_pos},
                                  {"mu_neg", syn->mixture.mu_neg}, {"sd", syn->mixture.sd},
                                  {"dim", syn->mixture.dim},     {"pool_size", syn->pool_size}};
        } else {
            const auto& cs = std::get<CsvSource>(d.source);
            entry["csv"] = cs.path.string();
            if (cs.pi) {
                entry["pi"] = *cs.pi;
            }
        }
        ds.push_back(entry);
    }
    for (Scenario s : spec.scenarios) {
        doc["scenarios"].push_back(std::string(to_string(s)));
    }
    for (Method m : spec.methods) {
        doc["methods"].push_back(std::string(to_string(m)));
    }
    doc["c_values"] = spec.c_values;
    doc["seeds"] = spec.seeds;
    doc["n"] = spec.n;
    doc["train_fraction"] = spec.train_fraction;
    doc["threads"] = spec.threads;
    doc["trainer"] = {{"beta", spec.trainer.beta},
                      {"gamma", spec.trainer.gamma},
                      {"eta", spec.trainer.eta},
                      {"epochs", spec.trainer.epochs},
                      {"batch_size", spec.trainer.batch_size},
                      {"optimizer", std::string(to_string(spec.trainer.optimizer))},
                      {"loss", std::string(to_string(spec.trainer.loss))}};
    doc["model"] = {{"hidden", spec.hidden},
                    {"activation", std::string(to_string(spec.activation))}};
    if (spec.trace_dir) {
        doc["trace_dir"] = spec.trace_dir->string();
    }
    return doc.dump(2);
}

// ---------------------------------------------------------------------------
// Cells and seeds

std::vector<GridCell> enumerate_cells(const GridSpec& spec) {
    std::vector<GridCell> cells;
    cells.reserve(spec.cell_count());
    for (std::size_t d = 0; d < spec.datasets.size(); ++d) {
        for (Scenario sc : spec.scenarios) {
            for (Method m : spec.methods) {
                for (double c : spec.c_values) {
                    for (std::uint64_t seed : spec.seeds) {
                        cells.push_back({d, sc, m, c, seed});
                    }
                }
            }
        }
    }
    return cells;
}

std::uint64_t hash_key(std::string_view key) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : key) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(h);
}

CellSeeds derive_cell_seeds(std::uint64_t seed, std::string_view dataset, Scenario scenario,
                            double c) {
    const std::string base = std::to_string(seed) + "|" + std::string(dataset);
    const std::string sampled =
        base + "|" + std::string(to_string(scenario)) + "|" + shortest(c);
    return {hash_key("pool|" + base), hash_key("sample|" + sampled),
            hash_key("train|" + sampled)};
}

std::pair<PUDataset, LabeledDataset> build_cell_data(const GridSpec& spec, const GridCell& cell) {
    const DatasetSource& src = spec.datasets.at(cell.dataset_index);
    const CellSeeds seeds = derive_cell_seeds(cell.seed, src.name, cell.scenario, cell.c);

    Rng pool_rng(seeds.pool);
    LabeledDataset pool;
    double pi = 0.0;
    PriorSource pi_source = PriorSource::configured;
    if (const auto* syn = std::get_if<SyntheticSource>(&src.source)) {
        pool = gaussian_mixture(syn->pool_size, syn->mixture, pool_rng);
        pi = syn->mixture.pi;
    } else {
        const auto& cs = std::get<CsvSource>(src.source);
        pool = load_csv(cs.path);
        pi = cs.pi.value_or(pool.empirical_prior());
        pi_source = cs.pi ? PriorSource::user_supplied : PriorSource::empirical;
    }
    auto [train_pool, test] = train_test_split(pool, {spec.train_fraction, seeds.pool}, pool_rng);

    Rng sample_rng(seeds.sample);
    PUDataset pu;
    if (cell.scenario == Scenario::single_sample) {
        ScarConfig cfg;
        cfg.c = cell.c;
        cfg.n = spec.n;
        cfg.with_replacement = spec.n > train_pool.size();
        cfg.pi = pi;
        pu = scar_label(train_pool, cfg, sample_rng);
    } else {
        CaseControlConfig cfg;
        cfg.c = cell.c;
        cfg.pi = pi;
        cfg.n = spec.n;
        pu = case_control_sample(train_pool, cfg, sample_rng);
    }
    pu.pi_source = pi_source;
    return {std::move(pu), std::move(test)};
}

CellOutcome run_cell(const GridSpec& spec, const GridCell& cell) {
    const DatasetSource& src = spec.datasets.at(cell.dataset_index);
    auto [pu, test] = build_cell_data(spec, cell);
    const CellSeeds seeds = derive_cell_seeds(cell.seed, src.name, cell.scenario, cell.c);

    const Rng train_rng(seeds.train);
    Rng init_rng = train_rng.child(0);
    std::vector<std::size_t> dims{pu.x.cols()};
    dims.insert(dims.end(), spec.hidden.begin(), spec.hidden.end());
    dims.push_back(1);
    MLPModel model = MLPModel::init(dims, spec.activation, init_rng);

    TrainerConfig cfg = spec.trainer;
    cfg.method = cell.method;
    cfg.seed = train_rng.child(1).next_u64();
    cfg.batch_size = std::min(cfg.batch_size, pu.size());
    TrainResult trained = train(pu, cfg, std::move(model), &test);

    CellOutcome out;
    out.result.dataset = src.name;
    out.result.scenario = cell.scenario;
    out.result.method = cell.method;
    out.result.c = cell.c;
    out.result.seed = cell.seed;
    const auto predicted = classify_scores(trained.model.forward(test.x));
    out.result.metrics = scores(confusion(predicted, test.y));
    if (spec.trace_dir) {
        std::filesystem::create_directories(*spec.trace_dir);
        const auto path = *spec.trace_dir / (src.name + "_" + std::string(to_string(cell.scenario)) +
                                             "_" + std::string(to_string(cell.method)) + "_c" +
                                             shortest(cell.c) + "_seed" +
                                             std::to_string(cell.seed) + ".csv");
        save_trace_csv(trained.trace, path);
        out.result.trace_path = path.string();
    }
    out.trace = std::move(trained.trace);
    out.model = std::move(trained.model);
    return out;
}

// ---------------------------------------------------------------------------
// Results file

std::string format_result_row(const ExperimentResult& r) {
    std::string row = r.dataset + "," + std::string(to_string(r.scenario)) + "," +
                      std::string(to_string(r.method)) + "," + shortest(r.c) + "," +
                      std::to_string(r.seed) + ",";
    if (r.ok()) {
        row += shortest(r.metrics.accuracy) + "," + shortest(r.metrics.precision) + "," +
               shortest(r.metrics.recall) + "," + shortest(r.metrics.f1) + "," +
               r.trace_path.value_or("");
    } else {
        std::string msg = *r.error;
        std::replace_if(msg.begin(), msg.end(), [](char ch) { return ch == ',' || ch == '\n'; },
                        ';');
        row += ",,,,error: " + msg;
    }
    return row;
}

std::vector<ExperimentResult> load_results(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != kResultsVersionLine) {
        throw FormatError(path.string() + ": missing results version line '" +
                          std::string(kResultsVersionLine) + "'");
    }
    if (!std::getline(in, line) || line != kResultsHeader) {
        throw FormatError(path.string() + ": unexpected results header");
    }
    std::vector<ExperimentResult> out;
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto cells = csv::split_line(line);
        const std::string ctx = path.string() + ": line " + std::to_string(line_no);
        if (cells.size() != 10) {
            throw FormatError(ctx + ": expected 10 fields");
        }
        ExperimentResult r;
        r.dataset = cells[0];
        r.scenario = parse_scenario(cells[1]);
        r.method = parse_method(cells[2]);
        r.c = csv::parse_double(cells[3], ctx);
        r.seed = static_cast<std::uint64_t>(std::stoull(cells[4]));
        if (cells[5].empty()) {
            const std::string& tail = cells[9];
            r.error = tail.rfind("error: ", 0) == 0 ? tail.substr(7) : tail;
        } else {
            r.metrics.accuracy = csv::parse_double(cells[5], ctx);
            r.metrics.precision = csv::parse_double(cells[6], ctx);
            r.metrics.recall = csv::parse_double(cells[7], ctx);
            r.metrics.f1 = csv::parse_double(cells[8], ctx);
            if (!cells[9].empty()) {
                r.trace_path = cells[9];
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

using CellKey = std::tuple<std::string, Scenario, Method, std::string, std::uint64_t>;

CellKey key_of(const ExperimentResult& r) {
    return {r.dataset, r.scenario, r.method, shortest(r.c), r.seed};
}

} // namespace

std::vector<ExperimentResult> run_grid(const GridSpec& spec,
                                       const std::filesystem::path& results_path) {
    spec.validate();
    const auto cells = enumerate_cells(spec);

    std::map<CellKey, ExperimentResult> done;
    const bool exists = std::filesystem::exists(results_path) &&
                        std::filesystem::file_size(results_path) > 0;
    if (exists) {
        for (auto& r : load_results(results_path)) {
            if (r.ok()) {
                done[key_of(r)] = std::move(r);
            }
        }
    }
    std::ofstream out(results_path, std::ios::binary | std::ios::app);
    if (!out) {
        throw IoError("cannot open " + results_path.string() + " for appending");
    }
    if (!exists) {
        out << kResultsVersionLine << '\n' << kResultsHeader << '\n';
        out.flush();
    }

    std::vector<ExperimentResult> results(cells.size());
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& cell = cells[i];
        ExperimentResult probe;
        probe.dataset = spec.datasets[cell.dataset_index].name;
        probe.scenario = cell.scenario;
        probe.method = cell.method;
        probe.c = cell.c;
        probe.seed = cell.seed;
        if (auto it = done.find(key_of(probe)); it != done.end()) {
            results[i] = it->second;
        } else {
            results[i] = probe;
            pending.push_back(i);
        }
    }

    // Workers pull pending cells in order; a cell's row is written once
    // every earlier pending cell has been written, so the file order is
    // independent of the thread count.
    std::mutex mu;
    std::vector<bool> finished(pending.size(), false);
    std::size_t next_task = 0;
    std::size_t next_write = 0;

    auto worker = [&] {
        while (true) {
            std::size_t task;
            {
                std::lock_guard lock(mu);
                if (next_task >= pending.size()) {
                    return;
                }
                task = next_task++;
            }
            const std::size_t idx = pending[task];
            ExperimentResult r = results[idx];
            try {
                r = run_cell(spec, cells[idx]).result;
            } catch (const std::exception& e) {
                r.error = e.what();
            }
            std::lock_guard lock(mu);
            results[idx] = std::move(r);
            finished[task] = true;
            while (next_write < pending.size() && finished[next_write]) {
                out << format_result_row(results[pending[next_write]]) << '\n';
                ++next_write;
            }
            out.flush();
        }
    };

    const std::size_t n_threads = std::min(spec.threads, std::max<std::size_t>(pending.size(), 1));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    if (!out) {
        throw IoError("write failed for " + results_path.string());
    }
    return results;
}

} // namespace pusc
