#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "treequery/ace.hpp"
#include "treequery/graph.hpp"

namespace treequery {

struct ReliabilityParams {
    int stages = 4;     // decision points charged by the union bound
    int experts = 5;    // majority panel size per query
    double alpha = 0.3; // independent per-expert error rate
    double edges = 0.0; // edge count scaling the expected-recovery figure
    double target = 0.95;
};

/// Rejects alpha outside [0, 0.5), experts or stages below 1, negative
/// edge counts, and targets outside (0, 1).
void validate(const ReliabilityParams& params);

/// Lower bound on the probability that one pair is classified correctly:
/// 1 - stages * exp(-2 * experts * (0.5 - alpha)^2), clamped to [0, 1].
/// Evaluates the formula as given, even on degenerate inputs.
double pairwise_bound(const ReliabilityParams& params);

/// edges * pairwise_bound: lower bound on the expected number of
/// correctly recovered edges.
double expected_edges(const ReliabilityParams& params);

/// Smallest panel size whose pairwise bound reaches `target`, never
/// below 1. Throws when alpha leaves the bound unattainable.
int required_experts(double target, int stages, double alpha);

struct MonteCarloResult {
    Relation relation = Relation::Unknown;
    int trials = 0;
    int correct = 0;
    double empirical = 0.0;
    double std_error = 0.0;       // binomial standard error of `empirical`
    double mean_confidence = 0.0; // reported, never asserted against
};

/// Runs tree_query `trials` times on a two-node graph carrying `truth`,
/// each trial against a freshly seeded simulated oracle at params.alpha,
/// and returns the fraction of trials that recovered the relation.
///
/// By default the panel is params.experts seats, a single run, and no
/// personas, so the result exercises plain majority voting. Pass `ace`
/// to rerun the estimate with the full adversarial pipeline instead.
MonteCarloResult monte_carlo_identifiability(Relation truth, const ReliabilityParams& params,
                                             int trials, std::uint64_t seed, int jobs = 1,
                                             const AceParams* ace = nullptr);

struct SweepSpec {
    std::vector<int> experts;
    std::vector<double> alphas;
    std::vector<int> stages;
    int trials = 1000;
    std::vector<Relation> relations; // empty means all four
};

/// Parses {"m": [...], "alpha": [...], "M": [...], "trials": n} with an
/// optional "relations" list. Scalar grid entries are accepted.
SweepSpec sweep_from_json(const nlohmann::json& doc);

struct SweepRow {
    int experts = 0;
    double alpha = 0.0;
    int stages = 0;
    int trials = 0;
    Relation relation = Relation::Unknown;
    double bound = 0.0;
    double empirical = 0.0;
    double std_error = 0.0;
};

/// Full grid product. Simulation cost does not depend on the stage
/// count, so cells differing only in `stages` share one estimate.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::uint64_t seed, int jobs = 1);

std::string sweep_csv(const std::vector<SweepRow>& rows);

} // namespace treequery
