#include "treequery/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "treequery/bench.hpp"
#include "treequery/config.hpp"
#include "treequery/theory.hpp"
#include "treequery/tree.hpp"

namespace treequery {

namespace {

namespace fs = std::filesystem;

std::string fixed2(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

std::string fixed6(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

std::string dump(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

/// Collects emitted files so a failing run leaves nothing partial behind.
class OutputTracker {
public:
    explicit OutputTracker(std::string dir) : dir_(std::move(dir)) {
        if (dir_.empty()) throw std::invalid_argument("output directory must not be empty");
        created_dir_ = !fs::exists(dir_);
        fs::create_directories(dir_);
    }

    ~OutputTracker() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& p : written_) fs::remove(p, ec);
        if (created_dir_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
    }

    fs::path write(const std::string& name, const std::string& content) {
        const fs::path p = fs::path(dir_) / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + p.string());
        out << content;
        out.close();
        if (!out) throw std::runtime_error("failed writing " + p.string());
        written_.push_back(p);
        return p;
    }

    void commit() { committed_ = true; }

private:
    fs::path dir_;
    bool created_dir_ = false;
    bool committed_ = false;
    std::vector<fs::path> written_;
};

struct DiscoverOpts {
    std::string graph;
    bool graphless = false;
    std::vector<std::string> vars;
    std::vector<std::string> pair;
    std::string out_dir = "out";
};

struct BenchmarkOpts {
    std::string manifest;
    std::string suite;
    std::string method = "tree_query";
    int runs = 1;
    std::string out_dir = "out";
};

struct ScreenOpts {
    std::string stages;
    std::string treatment;
    std::string outcome;
    std::string graph;
    std::string out_dir = "out";
};

struct TheoryOpts {
    double experts_for = 0.0;
    bool bound = false;
    int stages = 4;
    int experts = 5;
    double alpha = 0.3;
    double edges = 0.0;
    std::string sweep;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string out_dir = "out";
};

/// Flags shared by the subcommands that run a backend. `detail` is parsed
/// after the fact so the config file value survives when the flag is absent.
void add_backend_flags(CLI::App* cmd, Config& cfg, std::string& detail, std::string& config_path) {
    cmd->add_option("--config", config_path, "JSON config file; flags override its values");
    cmd->add_option("--backend", cfg.backend, "simulated or remote")->capture_default_str();
    cmd->add_option("--alpha", cfg.alpha, "simulated per-seat flip probability")
        ->capture_default_str();
    cmd->add_option("--alpha-adv", cfg.alpha_adv,
                    "flip probability under personas; defaults to --alpha");
    cmd->add_option("--seed", cfg.seed, "top-level seed")->capture_default_str();
    cmd->add_option("--tau", cfg.tau, "confidence threshold")->capture_default_str();
    cmd->add_option("--experts", cfg.ace.m, "panel seats per run")->capture_default_str();
    cmd->add_option("--panel-runs", cfg.ace.runs, "independent panel runs per query")
        ->capture_default_str();
    cmd->add_option("--personas", cfg.ace.personas, "adversarial personas, 0 to 3")
        ->capture_default_str();
    cmd->add_option("--weights", cfg.ace.weights, "persona weights, comma-separated")
        ->delimiter(',');
    cmd->add_option("--detail", detail, "log detail: none, stats, or full");
    cmd->add_option("--jobs", cfg.jobs, "worker thread cap")->capture_default_str();
    cmd->add_option("--endpoint", cfg.remote.endpoint, "chat-completions URL")
        ->capture_default_str();
    cmd->add_option("--model", cfg.remote.model, "remote model name")->capture_default_str();
    cmd->add_option("--timeout", cfg.remote.timeout_seconds, "remote timeout, seconds")
        ->capture_default_str();
    cmd->add_option("--retries", cfg.remote.retries, "remote retry count")->capture_default_str();
}

/// The config file must be applied before CLI11 sees the other flags, so
/// it is pulled out of argv ahead of the real parse.
std::string scan_config_flag(int argc, const char* const* argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return "";
}

void cmd_discover(const DiscoverOpts& opt, Config cfg, std::ostream& out) {
    if (!opt.graph.empty() && opt.graphless) {
        throw std::invalid_argument("choose either --graph or --graphless");
    }
    std::optional<CausalGraph> truth;
    std::vector<std::string> vars;
    if (!opt.graph.empty()) {
        truth = parse_graph(read_json_file(opt.graph));
        vars = truth->nodes();
    } else if (opt.graphless) {
        vars = opt.vars;
        if (vars.size() < 2) {
            throw std::invalid_argument("--graphless needs --vars with at least two names");
        }
    } else {
        throw std::invalid_argument("pass --graph FILE, or --graphless with --vars");
    }

    auto backend = make_backend(cfg, truth);
    OutputTracker tracker(opt.out_dir);

    if (!opt.pair.empty()) {
        auto decision = tree_query(opt.pair[0], opt.pair[1], vars, cfg.tau, cfg.ace, *backend);
        nlohmann::json doc = to_json(decision);
        doc["kind"] = "pair_decision";
        doc["config"] = to_json(cfg);
        const auto path = tracker.write("pair.json", dump(doc));
        out << opt.pair[0] << " " << relation_name(decision.relation) << " " << opt.pair[1]
            << " (confidence " << fixed2(decision.confidence) << ")\n";
        out << "wrote " << path.string() << "\n";
    } else {
        auto result = discover_graph(vars, cfg.tau, cfg.ace, *backend, cfg.jobs);
        nlohmann::json doc;
        doc["kind"] = "discovery";
        doc["config"] = to_json(cfg);
        doc["graph"] = graph_to_json(result.graph);
        auto decisions = nlohmann::json::array();
        for (const auto& [key, decision] : result.decisions) decisions.push_back(to_json(decision));
        doc["decisions"] = std::move(decisions);
        doc["warnings"] = result.warnings;
        const auto path = tracker.write("discovered.json", dump(doc));
        out << vars.size() << " variables, " << result.graph.directed().size() << " directed and "
            << result.graph.bidirected().size() << " bidirected edge(s)\n";
        for (const auto& w : result.warnings) out << "warning: " << w << "\n";
        out << "wrote " << path.string() << "\n";
    }
    tracker.write("config.json", dump(to_json(cfg)));
    tracker.commit();
}

void cmd_benchmark(const BenchmarkOpts& opt, bool suite_overridden, Config cfg,
                   std::ostream& out) {
    auto [suite, cases] = load_manifest(opt.manifest);
    if (suite_overridden) suite = parse_suite(opt.suite);

    BenchmarkParams params;
    params.suite = suite;
    params.method = parse_method(opt.method);
    params.runs = opt.runs;
    params.tau = cfg.tau;
    params.alpha = cfg.alpha;
    params.alpha_adv = cfg.alpha_adv;
    params.seed = cfg.seed;
    params.ace = cfg.ace;
    params.ace.detail = LogDetail::None; // reports carry no logs
    params.jobs = cfg.jobs;

    BackendFactory factory;
    if (cfg.backend == "remote") {
        const RemoteConfig remote = cfg.remote;
        factory = [remote](const CausalGraph&, const std::string&, int) {
            return std::unique_ptr<ExpertBackend>(std::make_unique<RemoteBackend>(remote));
        };
    } else {
        factory = simulated_backend_factory(params);
    }

    auto report = run_benchmark(cases, params, factory);
    nlohmann::json doc = to_json(report);
    doc["config"]["backend"] = cfg.backend;
    if (cfg.backend == "remote") {
        doc["config"]["remote"] = to_json(cfg)["remote"];
    }

    OutputTracker tracker(opt.out_dir);
    const auto json_path = tracker.write("report.json", dump(doc));
    const auto md_path = tracker.write("report.md", markdown_report(report));
    tracker.write("config.json", dump(to_json(cfg)));
    tracker.commit();

    out << markdown_report(report);
    if (!report.failures.empty()) {
        out << report.failures.size() << " cell(s) failed; see " << json_path.string() << "\n";
    }
    out << "wrote " << json_path.string() << " and " << md_path.string() << "\n";
}

void cmd_screen(const ScreenOpts& opt, Config cfg, std::ostream& out) {
    nlohmann::json doc = read_json_file(opt.stages);
    std::string treatment = opt.treatment;
    std::string outcome = opt.outcome;
    std::vector<std::vector<std::string>> stages;
    if (doc.is_object()) {
        if (treatment.empty() && doc.contains("treatment")) {
            treatment = doc.at("treatment").get<std::string>();
        }
        if (outcome.empty() && doc.contains("outcome")) {
            outcome = doc.at("outcome").get<std::string>();
        }
        stages = doc.at("stages").get<std::vector<std::vector<std::string>>>();
    } else if (doc.is_array()) {
        stages = doc.get<std::vector<std::vector<std::string>>>();
    } else {
        throw std::invalid_argument(opt.stages + ": expected an object or an array of stages");
    }
    if (treatment.empty() || outcome.empty()) {
        throw std::invalid_argument("treatment and outcome must come from flags or the stages file");
    }

    std::optional<CausalGraph> truth;
    if (!opt.graph.empty()) truth = parse_graph(read_json_file(opt.graph));
    auto backend = make_backend(cfg, truth);

    auto trace = confounder_screen(treatment, outcome, stages, cfg.tau, cfg.ace, *backend);
    nlohmann::json trace_doc = to_json(trace);
    trace_doc["config"] = to_json(cfg);

    OutputTracker tracker(opt.out_dir);
    const auto path = tracker.write("screening.json", dump(trace_doc));
    tracker.write("config.json", dump(to_json(cfg)));
    tracker.commit();

    for (std::size_t i = 0; i < trace.stages.size(); ++i) {
        const auto& stage = trace.stages[i];
        out << "stage " << (i + 1) << ": " << stage.variables.size() << " variables, "
            << treatment << " " << relation_name(stage.relation) << " " << outcome
            << ", confidence " << fixed2(stage.confidence) << ", confounding "
            << fixed2(stage.confounding_confidence) << "\n";
    }
    out << "wrote " << path.string() << "\n";
}

void cmd_theory(const TheoryOpts& opt, bool experts_for_set, std::ostream& out) {
    const int modes = (experts_for_set ? 1 : 0) + (opt.bound ? 1 : 0) +
                      (opt.sweep.empty() ? 0 : 1);
    if (modes != 1) {
        throw std::invalid_argument("pick exactly one of --experts-for, --bound, or --sweep");
    }

    if (experts_for_set) {
        out << required_experts(opt.experts_for, opt.stages, opt.alpha) << "\n";
        return;
    }

    if (opt.bound) {
        ReliabilityParams params;
        params.stages = opt.stages;
        params.experts = opt.experts;
        params.alpha = opt.alpha;
        params.edges = opt.edges;
        validate(params);
        out << "bound(M=" << opt.stages << ", m=" << opt.experts << ", alpha=" << opt.alpha
            << ") = " << fixed6(pairwise_bound(params)) << "\n";
        if (opt.stages != 9) {
            ReliabilityParams nine = params;
            nine.stages = 9;
            out << "bound(M=9, m=" << opt.experts << ", alpha=" << opt.alpha
                << ") = " << fixed6(pairwise_bound(nine)) << "\n";
        }
        if (opt.edges > 0.0) {
            out << "expected correct edges over " << opt.edges << " = "
                << fixed6(expected_edges(params)) << "\n";
        }
        return;
    }

    const nlohmann::json spec_doc = read_json_file(opt.sweep);
    const SweepSpec spec = sweep_from_json(spec_doc);
    auto rows = run_sweep(spec, opt.seed, opt.jobs);

    OutputTracker tracker(opt.out_dir);
    const auto path = tracker.write("sweep.csv", sweep_csv(rows));
    nlohmann::json snapshot;
    snapshot["kind"] = "config";
    snapshot["command"] = "theory";
    snapshot["seed"] = opt.seed;
    snapshot["jobs"] = opt.jobs;
    snapshot["sweep"] = spec_doc;
    tracker.write("config.json", dump(snapshot));
    tracker.commit();
    out << "wrote " << rows.size() << " row(s) to " << path.string() << "\n";
}

void validate_graph_doc(const nlohmann::json& doc, std::ostream& out, const char* label) {
    const CausalGraph g = parse_graph(doc, true);
    const auto cycle = g.directed_cycle();
    if (!cycle.empty()) {
        out << "warning: " << label << " contains a directed cycle: ";
        for (std::size_t i = 0; i < cycle.size(); ++i) {
            if (i > 0) out << " -> ";
            out << cycle[i];
        }
        out << "\n";
    }
    out << "ok: " << label << " with " << g.node_count() << " node(s), "
        << g.directed().size() << " directed, " << g.bidirected().size() << " bidirected\n";
}

void validate_csv(const std::string& path, std::ostream& out) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "m,alpha,M,trials,relation,bound,empirical,stderr") {
        throw std::invalid_argument(path + ": not a sweep csv (unexpected header)");
    }
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) fields.push_back(cell);
        if (fields.size() != 8) {
            throw std::invalid_argument(path + ": row " + std::to_string(rows + 1) +
                                        " has " + std::to_string(fields.size()) + " fields");
        }
        std::stoi(fields[0]);
        std::stod(fields[1]);
        std::stoi(fields[2]);
        std::stoi(fields[3]);
        parse_relation(fields[4]);
        std::stod(fields[5]);
        std::stod(fields[6]);
        std::stod(fields[7]);
        ++rows;
    }
    out << "ok: sweep csv with " << rows << " row(s)\n";
}

void cmd_validate(const std::string& path, std::ostream& out) {
    const std::string ext = fs::path(path).extension().string();
    if (ext == ".csv") {
        validate_csv(path, out);
        return;
    }
    if (ext == ".md") {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open " + path);
        std::stringstream text;
        text << in.rdbuf();
        if (text.str().find("| Method | Suite |") == std::string::npos) {
            throw std::invalid_argument(path + ": not a benchmark table");
        }
        out << "ok: benchmark table\n";
        return;
    }

    const nlohmann::json doc = read_json_file(path);
    if (!doc.is_object()) throw std::invalid_argument(path + ": expected a JSON object");

    if (!doc.contains("kind")) {
        if (!doc.contains("nodes")) {
            throw std::invalid_argument(path + ": neither a graph nor a tagged document");
        }
        validate_graph_doc(doc, out, "graph");
        return;
    }

    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "discovery") {
        config_from_json(doc.at("config"));
        for (const auto& entry : doc.at("decisions")) pair_decision_from_json(entry);
        // Discovered graphs may legitimately contain cycles; they are
        // reported by the discover run itself, so only warn here.
        validate_graph_doc(doc.at("graph"), out, "discovered graph");
    } else if (kind == "pair_decision") {
        pair_decision_from_json(doc);
        if (doc.contains("config")) config_from_json(doc.at("config"));
        out << "ok: pair decision " << doc.at("x1").get<std::string>() << " "
            << doc.at("relation").get<std::string>() << " " << doc.at("x2").get<std::string>()
            << "\n";
    } else if (kind == "benchmark_report") {
        const auto& cfg = doc.at("config");
        parse_suite(cfg.at("suite").get<std::string>());
        parse_method(cfg.at("method").get<std::string>());
        doc.at("aggregate").at("shd_mean").get<double>();
        int cells = 0;
        for (const auto& cell : doc.at("results")) {
            cell.at("graph").get<std::string>();
            cell.at("run").get<int>();
            cell.at("shd").get<double>();
            ++cells;
        }
        out << "ok: benchmark report with " << cells << " cell(s)\n";
    } else if (kind == "screening_trace") {
        int stages = 0;
        for (const auto& stage : doc.at("stages")) {
            stage.at("variables").get<std::vector<std::string>>();
            parse_relation(stage.at("relation").get<std::string>());
            stage.at("confidence").get<double>();
            stage.at("confounding_confidence").get<double>();
            ++stages;
        }
        if (doc.contains("config")) config_from_json(doc.at("config"));
        out << "ok: screening trace with " << stages << " stage(s)\n";
    } else if (kind == "config") {
        if (!doc.contains("command")) config_from_json(doc);
        out << "ok: config snapshot\n";
    } else {
        throw std::invalid_argument(path + ": unknown document kind '" + kind + "'");
    }
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Config cfg;
    try {
        const std::string config_path = scan_config_flag(argc, argv);
        if (!config_path.empty()) cfg = config_from_json(read_json_file(config_path));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    CLI::App app{"query-tree causal discovery over expert panels"};
    app.require_subcommand(1);
    std::string config_path_echo;
    std::string detail_flag;

    DiscoverOpts dopt;
    auto* discover = app.add_subcommand("discover", "infer pairwise relations or a whole graph");
    discover->add_option("--graph", dopt.graph, "truth graph JSON for the simulated backend");
    discover->add_flag("--graphless", dopt.graphless, "no truth graph; use with --vars");
    discover->add_option("--vars", dopt.vars, "variable names, comma-separated")->delimiter(',');
    discover->add_option("--pair", dopt.pair, "analyze one ordered pair")->expected(2);
    discover->add_option("--out", dopt.out_dir, "output directory")->capture_default_str();
    add_backend_flags(discover, cfg, detail_flag, config_path_echo);

    BenchmarkOpts bopt;
    auto* benchmark = app.add_subcommand("benchmark", "score discovery against a graph suite");
    benchmark->add_option("--manifest", bopt.manifest, "suite manifest JSON")->required();
    auto* suite_opt = benchmark->add_option("--suite", bopt.suite,
                                            "override the manifest suite: standard or latent");
    benchmark->add_option("--method", bopt.method, "tree_query or direct_llm")
        ->capture_default_str();
    benchmark->add_option("--runs", bopt.runs, "repetitions per graph")->capture_default_str();
    benchmark->add_option("--out", bopt.out_dir, "output directory")->capture_default_str();
    add_backend_flags(benchmark, cfg, detail_flag, config_path_echo);

    ScreenOpts sopt;
    auto* screen = app.add_subcommand("screen", "stage-by-stage confounder screening");
    screen->add_option("--stages", sopt.stages, "stages JSON file")->required();
    screen->add_option("--treatment", sopt.treatment, "treatment variable");
    screen->add_option("--outcome", sopt.outcome, "outcome variable");
    screen->add_option("--graph", sopt.graph, "truth graph JSON for the simulated backend");
    screen->add_option("--out", sopt.out_dir, "output directory")->capture_default_str();
    add_backend_flags(screen, cfg, detail_flag, config_path_echo);

    TheoryOpts topt;
    auto* theory = app.add_subcommand("theory", "reliability bounds and Monte Carlo sweeps");
    auto* experts_for =
        theory->add_option("--experts-for", topt.experts_for, "panel size reaching this target");
    theory->add_flag("--bound", topt.bound, "print the pairwise reliability bound");
    theory->add_option("--stages", topt.stages, "decision stages M")->capture_default_str();
    theory->add_option("--experts", topt.experts, "panel size m")->capture_default_str();
    theory->add_option("--alpha", topt.alpha, "per-expert error rate")->capture_default_str();
    theory->add_option("--edges", topt.edges, "edge count for the expected-recovery figure");
    theory->add_option("--sweep", topt.sweep, "sweep spec JSON; writes a CSV");
    theory->add_option("--seed", topt.seed, "sweep seed")->capture_default_str();
    theory->add_option("--jobs", topt.jobs, "worker thread cap")->capture_default_str();
    theory->add_option("--out", topt.out_dir, "output directory")->capture_default_str();

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "check a file emitted by any subcommand");
    validate_cmd->add_option("file", validate_path, "path to check")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (!detail_flag.empty()) cfg.ace.detail = parse_detail(detail_flag);
        if (app.got_subcommand(discover)) {
            cmd_discover(dopt, cfg, out);
        } else if (app.got_subcommand(benchmark)) {
            cmd_benchmark(bopt, suite_opt->count() > 0, cfg, out);
        } else if (app.got_subcommand(screen)) {
            cmd_screen(sopt, cfg, out);
        } else if (app.got_subcommand(theory)) {
            cmd_theory(topt, experts_for->count() > 0, out);
        } else {
            cmd_validate(validate_path, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace treequery
