#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "treequery/ace.hpp"
#include "treequery/graph.hpp"
#include "treequery/tree.hpp"

namespace treequery {

enum class Suite { Standard, Latent };
enum class Method { TreeQuery, DirectLlm };

std::string suite_name(Suite s);
Suite parse_suite(const std::string& name);
std::string method_name(Method m);
Method parse_method(const std::string& name);

struct BenchmarkCase {
    std::string name;
    CausalGraph graph;
};

struct BenchmarkParams {
    Suite suite = Suite::Standard;
    Method method = Method::TreeQuery;
    int runs = 1;
    double tau = 0.7;
    double alpha = 0.0;
    std::optional<double> alpha_adv;
    std::uint64_t seed = 0;
    AceParams ace;
    int jobs = 1;
};

struct GraphResult {
    std::string graph;
    int run = 0;
    int shd = 0;
    std::optional<double> ndcg;
};

struct BenchmarkFailure {
    std::string graph;
    int run = 0;
    std::string error;
};

struct BenchmarkReport {
    BenchmarkParams params;
    std::vector<GraphResult> results;
    std::vector<BenchmarkFailure> failures;
    double shd_mean = 0.0;
    double shd_std = 0.0;
    std::optional<double> ndcg_mean;
    std::optional<double> ndcg_std;
};

// Supplies the backend for one (truth, graph name, run) cell, so noise can be
// reseeded per cell while a remote backend just hands itself out repeatedly.
using BackendFactory = std::function<std::unique_ptr<ExpertBackend>(
    const CausalGraph& truth, const std::string& name, int run)>;

// Factory producing per-cell seeded simulated oracles; two benchmarks with
// equal params produce byte-identical reports.
BackendFactory simulated_backend_factory(const BenchmarkParams& params);

// Scores discovery over the suite. Latent benchmarks project hidden nodes
// into bidirected edges before anything is asked or scored. A failing cell
// is recorded and skipped; only a benchmark with no surviving cell throws.
BenchmarkReport run_benchmark(const std::vector<BenchmarkCase>& cases,
                              const BenchmarkParams& params, const BackendFactory& factory);

nlohmann::json to_json(const BenchmarkReport& report);
std::string markdown_report(const BenchmarkReport& report);

// Manifest: {"suite": ..., "graphs": [paths...]}, paths relative to the
// manifest's own directory.
std::pair<Suite, std::vector<BenchmarkCase>> load_manifest(const std::string& path);

struct ScreeningStage {
    std::vector<std::string> variables;
    Relation relation = Relation::Unknown;
    double confidence = 0.0;
    double confounding_confidence = 0.0;
    PairDecision decision;
};

struct ScreeningTrace {
    std::string treatment;
    std::string outcome;
    double tau = 0.7;
    std::vector<ScreeningStage> stages;
};

// How strongly one decision's evidence points at a latent confounder: the
// latent finding's confidence (or its complement for a negative finding)
// from the branch the backdoor probe selected, or the worse branch when the
// probe was inconclusive.
double confounding_confidence(const PairDecision& decision);

// Reruns the treatment/outcome pair under growing covariate sets and traces
// how the confounding signal moves while the relation holds still.
ScreeningTrace confounder_screen(const std::string& treatment, const std::string& outcome,
                                 const std::vector<std::vector<std::string>>& stages, double tau,
                                 const AceParams& params, ExpertBackend& backend);

nlohmann::json to_json(const ScreeningTrace& trace);

} // namespace treequery
