#include "treequery/run_log.hpp"

#include <stdexcept>

#include "treequery/ace.hpp"

namespace treequery {

QueryType parse_query_type(const std::string& name) {
    if (name == "backdoor_path") return QueryType::BackdoorPath;
    if (name == "independence") return QueryType::Independence;
    if (name == "latent_confounder") return QueryType::LatentConfounder;
    if (name == "causal_direction") return QueryType::CausalDirection;
    throw std::invalid_argument("unknown query type '" + name + "'");
}

Branch parse_branch(const std::string& name) {
    if (name == "root") return Branch::Root;
    if (name == "after_block") return Branch::AfterBlock;
    if (name == "no_backdoor") return Branch::NoBackdoor;
    throw std::invalid_argument("unknown branch '" + name + "'");
}

Persona parse_persona(const std::string& name) {
    if (name == "Contrarian") return Persona::Contrarian;
    if (name == "Deceiver") return Persona::Deceiver;
    if (name == "Hater") return Persona::Hater;
    throw std::invalid_argument("unknown persona '" + name + "'");
}

Conclusion parse_conclusion(const std::string& name) {
    if (name == "Yes") return Conclusion::Yes;
    if (name == "No") return Conclusion::No;
    throw std::invalid_argument("unknown conclusion '" + name + "'");
}

nlohmann::json to_json(const QuerySpec& q) {
    nlohmann::json doc;
    doc["type"] = query_type_name(q.query_type);
    if (q.query_type == QueryType::CausalDirection)
        doc["polarity"] = q.polarity == Polarity::Forward ? "forward" : "backward";
    doc["branch"] = branch_name(q.branch);
    doc["x1"] = q.x1;
    doc["x2"] = q.x2;
    doc["variables"] = q.variables;
    return doc;
}

QuerySpec query_from_json(const nlohmann::json& doc) {
    QuerySpec q;
    q.query_type = parse_query_type(doc.at("type").get<std::string>());
    if (doc.contains("polarity")) {
        const auto pol = doc.at("polarity").get<std::string>();
        if (pol != "forward" && pol != "backward")
            throw std::invalid_argument("unknown polarity '" + pol + "'");
        q.polarity = pol == "forward" ? Polarity::Forward : Polarity::Backward;
    }
    q.branch = parse_branch(doc.at("branch").get<std::string>());
    q.x1 = doc.at("x1").get<std::string>();
    q.x2 = doc.at("x2").get<std::string>();
    q.variables = doc.at("variables").get<std::vector<std::string>>();
    return q;
}

static nlohmann::json to_json(const SeatRecord& seat) {
    nlohmann::json doc;
    doc["expert"] = seat.expert_id;
    if (seat.conclusion) {
        doc["conclusion"] = conclusion_name(*seat.conclusion);
    } else {
        doc["conclusion"] = nullptr;
    }
    if (!seat.prompt.empty()) doc["prompt"] = seat.prompt;
    if (!seat.reply.empty()) doc["reply"] = seat.reply;
    return doc;
}

static SeatRecord seat_from_json(const nlohmann::json& doc) {
    SeatRecord seat;
    seat.expert_id = doc.at("expert").get<int>();
    if (!doc.at("conclusion").is_null())
        seat.conclusion = parse_conclusion(doc.at("conclusion").get<std::string>());
    seat.prompt = doc.value("prompt", "");
    seat.reply = doc.value("reply", "");
    return seat;
}

nlohmann::json to_json(const PanelRun& run) {
    nlohmann::json doc;
    doc["run"] = run.run;
    if (run.persona) doc["persona"] = persona_name(*run.persona);
    doc["yes"] = run.yes;
    doc["no"] = run.no;
    doc["abstained"] = run.abstained;
    doc["conclusion"] = conclusion_name(run.conclusion);
    if (!run.adversarial_argument.empty()) doc["argument"] = run.adversarial_argument;
    if (!run.seats.empty()) {
        auto seats = nlohmann::json::array();
        for (const auto& s : run.seats) seats.push_back(to_json(s));
        doc["seats"] = std::move(seats);
    }
    return doc;
}

PanelRun panel_run_from_json(const nlohmann::json& doc) {
    PanelRun run;
    run.run = doc.at("run").get<int>();
    if (doc.contains("persona")) run.persona = parse_persona(doc.at("persona").get<std::string>());
    run.yes = doc.at("yes").get<int>();
    run.no = doc.at("no").get<int>();
    run.abstained = doc.at("abstained").get<int>();
    run.conclusion = parse_conclusion(doc.at("conclusion").get<std::string>());
    run.adversarial_argument = doc.value("argument", "");
    if (doc.contains("seats")) {
        for (const auto& s : doc.at("seats")) run.seats.push_back(seat_from_json(s));
    }
    return run;
}

static nlohmann::json to_json(const ConsensusStats& stats) {
    return {{"n_yes", stats.n_yes},
            {"n_no", stats.n_no},
            {"p0_raw", stats.p0_raw},
            {"p0", stats.p0},
            {"y_star", conclusion_name(stats.y_star)}};
}

static ConsensusStats stats_from_json(const nlohmann::json& doc) {
    ConsensusStats stats;
    stats.n_yes = doc.at("n_yes").get<int>();
    stats.n_no = doc.at("n_no").get<int>();
    stats.p0_raw = doc.at("p0_raw").get<double>();
    stats.p0 = doc.at("p0").get<double>();
    stats.y_star = parse_conclusion(doc.at("y_star").get<std::string>());
    return stats;
}

nlohmann::json to_json(const AceLog& log) {
    nlohmann::json doc;
    doc["query"] = to_json(log.query);
    doc["experts"] = log.expert_ids;
    if (!log.base_query.empty()) doc["base_query"] = log.base_query;
    auto base = nlohmann::json::array();
    for (const auto& r : log.baseline) base.push_back(to_json(r));
    doc["baseline_runs"] = std::move(base);
    auto personas = nlohmann::json::array();
    for (const auto& p : log.personas) {
        nlohmann::json entry;
        entry["persona"] = persona_name(p.persona);
        entry["p_j"] = p.p_j;
        auto runs = nlohmann::json::array();
        for (const auto& r : p.runs) runs.push_back(to_json(r));
        entry["runs"] = std::move(runs);
        personas.push_back(std::move(entry));
    }
    doc["personas"] = std::move(personas);
    doc["stats"] = to_json(log.stats);
    doc["weights"] = log.weights;
    doc["confidence"] = log.confidence;
    doc["y_hat"] = log.y_hat;
    doc["abstentions"] = log.had_abstentions;
    return doc;
}

AceLog ace_log_from_json(const nlohmann::json& doc) {
    AceLog log;
    log.query = query_from_json(doc.at("query"));
    log.expert_ids = doc.at("experts").get<std::vector<int>>();
    log.base_query = doc.value("base_query", "");
    for (const auto& r : doc.at("baseline_runs")) log.baseline.push_back(panel_run_from_json(r));
    for (const auto& p : doc.at("personas")) {
        PersonaTrace trace;
        trace.persona = parse_persona(p.at("persona").get<std::string>());
        trace.p_j = p.at("p_j").get<double>();
        for (const auto& r : p.at("runs")) trace.runs.push_back(panel_run_from_json(r));
        log.personas.push_back(std::move(trace));
    }
    log.stats = stats_from_json(doc.at("stats"));
    log.weights = doc.at("weights").get<std::vector<double>>();
    log.confidence = doc.at("confidence").get<double>();
    log.y_hat = doc.at("y_hat").get<int>();
    log.had_abstentions = doc.at("abstentions").get<bool>();
    return log;
}

double recompute_confidence(const AceLog& log) {
    std::vector<Conclusion> baseline;
    for (const auto& r : log.baseline) baseline.push_back(r.conclusion);
    const ConsensusStats stats = baseline_consensus(baseline);
    std::vector<double> p_js;
    for (const auto& p : log.personas) {
        std::vector<Conclusion> perturbed;
        for (const auto& r : p.runs) perturbed.push_back(r.conclusion);
        p_js.push_back(persona_consistency(perturbed, stats.y_star));
    }
    return confidence_score(stats, p_js, log.weights);
}

} // namespace treequery
