#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "treequery/panel.hpp"

namespace treequery {

QueryType parse_query_type(const std::string& name);
Branch parse_branch(const std::string& name);
Persona parse_persona(const std::string& name);
Conclusion parse_conclusion(const std::string& name);

struct SeatRecord {
    int expert_id = 0;
    std::optional<Conclusion> conclusion; // nullopt marks an abstention
    std::string prompt; // full detail only
    std::string reply;  // full detail only; empty for the simulated backend
};

/// One m-seat panel invocation majority-voted to a single conclusion.
struct PanelRun {
    int run = 0;
    std::optional<Persona> persona; // set on adversarial re-queries
    int yes = 0;
    int no = 0;
    int abstained = 0;
    Conclusion conclusion = Conclusion::No;
    std::string adversarial_argument; // full detail, persona runs only
    std::vector<SeatRecord> seats;    // empty when the panel was counted in aggregate
};

struct ConsensusStats {
    int n_yes = 0;
    int n_no = 0;
    double p0_raw = 0.5;
    double p0 = 0.0;
    Conclusion y_star = Conclusion::No;
};

struct PersonaTrace {
    Persona persona = Persona::Contrarian;
    double p_j = 0.0;
    std::vector<PanelRun> runs;
};

/// Complete trace of one confidence-estimated query.
struct AceLog {
    QuerySpec query;
    std::vector<int> expert_ids;
    std::string base_query; // empty under aggregate-only logging
    std::vector<PanelRun> baseline;
    std::vector<PersonaTrace> personas;
    ConsensusStats stats;
    std::vector<double> weights;
    double confidence = 0.0;
    int y_hat = 0;
    bool had_abstentions = false;
};

nlohmann::json to_json(const QuerySpec& q);
QuerySpec query_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const PanelRun& run);
PanelRun panel_run_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const AceLog& log);
AceLog ace_log_from_json(const nlohmann::json& doc);

/// Re-derives the confidence from the logged run conclusions alone; matches
/// the logged value to floating-point noise on any untampered log.
double recompute_confidence(const AceLog& log);

} // namespace treequery
