#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "treequery/ace.hpp"
#include "treequery/graph.hpp"
#include "treequery/run_log.hpp"

namespace treequery {

// Intermediate labels attached to branch findings. Positive labels assert a
// relation; "not" labels only rule one out and never win on their own.
enum class RelationLabel {
    Independent,
    NotIndependent,
    Latent,
    NotLatent,
    Forward,
    NotForward,
    Backward,
    NotBackward,
};

std::string relation_label_name(RelationLabel label);
RelationLabel parse_relation_label(const std::string& text);

// Translates a panel verdict on one query into the label the decision rule
// consumes. Rejects backdoor queries; those gate branches instead.
RelationLabel map_to_relation(const QuerySpec& q, int y_hat);

struct BranchOutcome {
    Branch branch = Branch::NoBackdoor;
    RelationLabel relation = RelationLabel::NotIndependent;
    double confidence = 0.0;
};

// Raw evidence for one pair: the root backdoor probe plus eight branch
// findings (independence, latent confounder, and both direction polarities
// under each conceptual branch). outcome_logs parallels outcomes.
struct CheckResults {
    bool have_backdoor = false;
    double c_bd = 0.0;
    std::vector<BranchOutcome> outcomes;
    AceLog backdoor_log;
    std::vector<AceLog> outcome_logs;
};

CheckResults tree_query_checks(const std::string& x1, const std::string& x2,
                               const std::vector<std::string>& variables,
                               const AceParams& params, ExpertBackend& backend);

// Deterministic aggregation of branch findings. Total: never throws, and an
// empty or all-negative evidence set yields (Unknown, 0.0).
std::pair<Relation, double> decision_rule(bool have_backdoor, double c_bd,
                                          const std::vector<BranchOutcome>& outcomes,
                                          double tau);

struct PairDecision {
    std::string x1;
    std::string x2;
    Relation relation = Relation::Unknown;
    double confidence = 0.0;
    double tau = 0.7;
    bool have_backdoor = false;
    double backdoor_confidence = 0.0;
    std::vector<BranchOutcome> outcomes;
    AceLog backdoor_log;
    std::vector<AceLog> outcome_logs;
};

PairDecision tree_query(const std::string& x1, const std::string& x2,
                        const std::vector<std::string>& variables, double tau,
                        const AceParams& params, ExpertBackend& backend);

struct DiscoveryResult {
    CausalGraph graph;
    // Keyed by lexicographically ordered pair (x1 < x2).
    std::map<std::pair<std::string, std::string>, PairDecision> decisions;
    std::vector<std::string> warnings;
};

// Runs tree_query on every unordered pair and assembles the edges. Pairs are
// independent, so jobs > 1 fans them out across threads with identical
// results; the backend must then be safe to call concurrently.
DiscoveryResult discover_graph(const std::vector<std::string>& variables, double tau,
                               const AceParams& params, ExpertBackend& backend, int jobs = 1);

nlohmann::json to_json(const PairDecision& decision);
PairDecision pair_decision_from_json(const nlohmann::json& doc);

} // namespace treequery
