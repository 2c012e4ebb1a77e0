#include "treequery/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>

#include "treequery/hash.hpp"
#include "treequery/metrics.hpp"
#include "treequery/simulated.hpp"

namespace treequery {

namespace {

double mean_of(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double sq = 0.0;
    for (double x : xs) sq += (x - mean) * (x - mean);
    return std::sqrt(sq / static_cast<double>(xs.size() - 1));
}

std::string format_cell(double mean, double stddev, const char* fmt) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, mean, stddev);
    return buf;
}

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

nlohmann::json params_to_json(const BenchmarkParams& p) {
    nlohmann::json doc;
    doc["suite"] = suite_name(p.suite);
    doc["method"] = method_name(p.method);
    doc["runs"] = p.runs;
    doc["tau"] = p.tau;
    doc["alpha"] = p.alpha;
    if (p.alpha_adv) doc["alpha_adv"] = *p.alpha_adv;
    doc["seed"] = p.seed;
    doc["jobs"] = p.jobs;
    doc["panel"] = {{"experts", p.ace.m},
                    {"runs", p.ace.runs},
                    {"personas", p.ace.personas}};
    if (!p.ace.weights.empty()) doc["panel"]["weights"] = p.ace.weights;
    return doc;
}

} // namespace

std::string suite_name(Suite s) { return s == Suite::Standard ? "standard" : "latent"; }

Suite parse_suite(const std::string& name) {
    if (name == "standard") return Suite::Standard;
    if (name == "latent") return Suite::Latent;
    throw std::invalid_argument("unknown suite: " + name);
}

std::string method_name(Method m) { return m == Method::TreeQuery ? "tree_query" : "direct_llm"; }

Method parse_method(const std::string& name) {
    if (name == "tree_query") return Method::TreeQuery;
    if (name == "direct_llm") return Method::DirectLlm;
    throw std::invalid_argument("unknown method: " + name);
}

BackendFactory simulated_backend_factory(const BenchmarkParams& params) {
    const double alpha = params.alpha;
    const auto alpha_adv = params.alpha_adv;
    const std::uint64_t seed = params.seed;
    return [alpha, alpha_adv, seed](const CausalGraph& truth, const std::string& name,
                                    int run) -> std::unique_ptr<ExpertBackend> {
        using namespace hash;
        std::uint64_t h = kFnvOffset;
        h = fnv1a(h, seed);
        h = fnv1a(h, std::string_view(name));
        h = fnv1a(h, static_cast<std::uint64_t>(run));
        return std::make_unique<SimulatedOracle>(OracleConfig{truth, alpha, alpha_adv, mix64(h)});
    };
}

BenchmarkReport run_benchmark(const std::vector<BenchmarkCase>& cases,
                              const BenchmarkParams& params, const BackendFactory& factory) {
    if (cases.empty()) throw std::invalid_argument("benchmark needs at least one graph");
    if (params.runs < 1) throw std::invalid_argument("runs must be positive");

    BenchmarkReport report;
    report.params = params;

    for (const auto& item : cases) {
        for (int run = 0; run < params.runs; ++run) {
            try {
                const CausalGraph truth = params.suite == Suite::Latent
                    ? latent_transform(item.graph)
                    : item.graph;
                auto backend = factory(truth, item.name, run);

                GraphResult cell{item.name, run, 0, std::nullopt};
                if (params.method == Method::TreeQuery) {
                    auto discovery = discover_graph(truth.nodes(), params.tau, params.ace,
                                                    *backend, params.jobs);
                    cell.shd = shd(discovery.graph, truth);
                    std::vector<RankedPrediction> ranked;
                    for (const auto& [key, decision] : discovery.decisions) {
                        RankedPrediction p;
                        p.x1 = key.first;
                        p.x2 = key.second;
                        p.predicted = decision.relation;
                        p.confidence = decision.confidence;
                        p.correct =
                            decision.relation == pair_relation(truth, key.first, key.second) ? 1
                                                                                             : 0;
                        ranked.push_back(std::move(p));
                    }
                    rank_predictions(ranked);
                    cell.ndcg = ndcg_at_k(ranked, ranked.size());
                } else {
                    CausalGraph predicted(truth.nodes());
                    auto order = truth.nodes();
                    std::sort(order.begin(), order.end());
                    for (std::size_t i = 0; i < order.size(); ++i) {
                        for (std::size_t j = i + 1; j < order.size(); ++j) {
                            switch (direct_llm_baseline(order[i], order[j], truth.nodes(),
                                                        *backend)) {
                                case Relation::Forward:
                                    predicted.add_directed(order[i], order[j]);
                                    break;
                                case Relation::Backward:
                                    predicted.add_directed(order[j], order[i]);
                                    break;
                                case Relation::Latent:
                                    predicted.add_bidirected(order[i], order[j]);
                                    break;
                                default: break;
                            }
                        }
                    }
                    cell.shd = shd(predicted, truth);
                }
                report.results.push_back(std::move(cell));
            } catch (const std::exception& e) {
                report.failures.push_back({item.name, run, e.what()});
            }
        }
    }

    if (report.results.empty()) {
        throw std::runtime_error("every benchmark cell failed; first error: " +
                                 report.failures.front().error);
    }

    std::vector<double> shds, ndcgs;
    for (const auto& cell : report.results) {
        shds.push_back(static_cast<double>(cell.shd));
        if (cell.ndcg) ndcgs.push_back(*cell.ndcg);
    }
    report.shd_mean = mean_of(shds);
    report.shd_std = sample_std(shds, report.shd_mean);
    if (!ndcgs.empty()) {
        report.ndcg_mean = mean_of(ndcgs);
        report.ndcg_std = sample_std(ndcgs, *report.ndcg_mean);
    }
    return report;
}

nlohmann::json to_json(const BenchmarkReport& report) {
    nlohmann::json doc;
    doc["kind"] = "benchmark_report";
    doc["config"] = params_to_json(report.params);
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : report.results) {
        nlohmann::json entry{{"graph", cell.graph}, {"run", cell.run}, {"shd", cell.shd}};
        if (cell.ndcg) entry["ndcg"] = *cell.ndcg;
        cells.push_back(std::move(entry));
    }
    doc["results"] = std::move(cells);
    if (!report.failures.empty()) {
        nlohmann::json fails = nlohmann::json::array();
        for (const auto& f : report.failures) {
            fails.push_back({{"graph", f.graph}, {"run", f.run}, {"error", f.error}});
        }
        doc["failures"] = std::move(fails);
    }
    doc["aggregate"] = {{"shd_mean", report.shd_mean}, {"shd_std", report.shd_std}};
    if (report.ndcg_mean) {
        doc["aggregate"]["ndcg_mean"] = *report.ndcg_mean;
        doc["aggregate"]["ndcg_std"] = *report.ndcg_std;
    }
    return doc;
}

std::string markdown_report(const BenchmarkReport& report) {
    std::set<std::string> graphs;
    for (const auto& cell : report.results) graphs.insert(cell.graph);
    std::string out = "Benchmark: " + std::to_string(graphs.size()) + " graph(s) x " +
                      std::to_string(report.params.runs) + " run(s), alpha=" +
                      format_double(report.params.alpha) + ", seed=" +
                      std::to_string(report.params.seed) + "\n\n";
    out += "| Method | Suite | NDCG | SHD |\n";
    out += "| --- | --- | --- | --- |\n";
    const std::string method =
        report.params.method == Method::TreeQuery ? "Tree-Query" : "Direct LLM";
    const std::string suite = report.params.suite == Suite::Standard ? "Standard" : "Latent";
    const std::string ndcg = report.ndcg_mean
        ? format_cell(*report.ndcg_mean, *report.ndcg_std, "%.3f (%.3f)")
        : std::string("N/A");
    out += "| " + method + " | " + suite + " | " + ndcg + " | " +
           format_cell(report.shd_mean, report.shd_std, "%.2f (%.2f)") + " |\n";
    return out;
}

std::pair<Suite, std::vector<BenchmarkCase>> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);
    nlohmann::json doc = nlohmann::json::parse(in);
    if (!doc.is_object()) throw std::invalid_argument("manifest must be a JSON object");
    const Suite suite = parse_suite(doc.at("suite").get<std::string>());
    if (!doc.contains("graphs") || !doc.at("graphs").is_array() || doc.at("graphs").empty()) {
        throw std::invalid_argument("manifest needs a non-empty 'graphs' array");
    }
    const auto base = std::filesystem::path(path).parent_path();
    std::vector<BenchmarkCase> cases;
    for (const auto& entry : doc.at("graphs")) {
        const std::string rel = entry.get<std::string>();
        const auto file = base / rel;
        std::ifstream gin(file);
        if (!gin) throw std::runtime_error("cannot open graph file: " + file.string());
        cases.push_back({rel, parse_graph(nlohmann::json::parse(gin))});
    }
    return {suite, std::move(cases)};
}

double confounding_confidence(const PairDecision& decision) {
    auto branch_level = [&](Branch b) {
        for (const auto& o : decision.outcomes) {
            if (o.branch != b) continue;
            if (o.relation == RelationLabel::Latent) return o.confidence;
            if (o.relation == RelationLabel::NotLatent) return 1.0 - o.confidence;
        }
        return 0.0;
    };
    if (decision.backdoor_confidence >= decision.tau) {
        return branch_level(decision.have_backdoor ? Branch::AfterBlock : Branch::NoBackdoor);
    }
    return std::max(branch_level(Branch::AfterBlock), branch_level(Branch::NoBackdoor));
}

ScreeningTrace confounder_screen(const std::string& treatment, const std::string& outcome,
                                 const std::vector<std::vector<std::string>>& stages, double tau,
                                 const AceParams& params, ExpertBackend& backend) {
    if (stages.empty()) throw std::invalid_argument("screening needs at least one stage");
    for (const auto& stage : stages) {
        for (const auto& name : {treatment, outcome}) {
            if (std::find(stage.begin(), stage.end(), name) == stage.end()) {
                throw std::invalid_argument("stage is missing variable '" + name + "'");
            }
        }
    }
    ScreeningTrace trace;
    trace.treatment = treatment;
    trace.outcome = outcome;
    trace.tau = tau;
    for (const auto& stage : stages) {
        auto decision = tree_query(treatment, outcome, stage, tau, params, backend);
        ScreeningStage row;
        row.variables = stage;
        row.relation = decision.relation;
        row.confidence = decision.confidence;
        row.confounding_confidence = confounding_confidence(decision);
        row.decision = std::move(decision);
        trace.stages.push_back(std::move(row));
    }
    return trace;
}

nlohmann::json to_json(const ScreeningTrace& trace) {
    nlohmann::json doc;
    doc["kind"] = "screening_trace";
    doc["treatment"] = trace.treatment;
    doc["outcome"] = trace.outcome;
    doc["tau"] = trace.tau;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& stage : trace.stages) {
        rows.push_back({{"variables", stage.variables},
                        {"relation", relation_name(stage.relation)},
                        {"confidence", stage.confidence},
                        {"confounding_confidence", stage.confounding_confidence},
                        {"decision", to_json(stage.decision)}});
    }
    doc["stages"] = std::move(rows);
    return doc;
}

} // namespace treequery
