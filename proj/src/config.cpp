#include "treequery/config.hpp"

#include <stdexcept>

#include "treequery/run_log.hpp"
#include "treequery/simulated.hpp"

namespace treequery {

std::string detail_name(LogDetail d) {
    switch (d) {
        case LogDetail::None: return "none";
        case LogDetail::Stats: return "stats";
        default: return "full";
    }
}

LogDetail parse_detail(const std::string& name) {
    if (name == "none") return LogDetail::None;
    if (name == "stats") return LogDetail::Stats;
    if (name == "full") return LogDetail::Full;
    throw std::invalid_argument("unknown log detail: " + name);
}

void validate(const Config& cfg) {
    if (cfg.backend != "simulated" && cfg.backend != "remote") {
        throw std::invalid_argument("backend must be 'simulated' or 'remote', got '" +
                                    cfg.backend + "'");
    }
    if (!(cfg.alpha >= 0.0) || !(cfg.alpha < 0.5)) {
        throw std::invalid_argument("alpha must lie in [0, 0.5), got " +
                                    std::to_string(cfg.alpha));
    }
    if (cfg.alpha_adv && (!(*cfg.alpha_adv >= 0.0) || !(*cfg.alpha_adv < 0.5))) {
        throw std::invalid_argument("alpha_adv must lie in [0, 0.5), got " +
                                    std::to_string(*cfg.alpha_adv));
    }
    if (!(cfg.tau >= 0.0) || !(cfg.tau <= 1.0)) {
        throw std::invalid_argument("tau must lie in [0, 1], got " + std::to_string(cfg.tau));
    }
    if (cfg.ace.m < 1) throw std::invalid_argument("panel needs at least one seat");
    if (cfg.ace.runs < 1) throw std::invalid_argument("panel needs at least one run");
    if (cfg.ace.personas < 0 || cfg.ace.personas > 3) {
        throw std::invalid_argument("personas must lie in [0, 3], got " +
                                    std::to_string(cfg.ace.personas));
    }
    if (!cfg.ace.weights.empty() &&
        cfg.ace.weights.size() != static_cast<std::size_t>(cfg.ace.personas)) {
        throw std::invalid_argument("expected one weight per persona");
    }
    for (double w : cfg.ace.weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("persona weights must be nonnegative");
    }
    if (cfg.jobs < 1) throw std::invalid_argument("jobs must be at least 1");
}

nlohmann::json to_json(const Config& cfg) {
    nlohmann::json doc;
    doc["kind"] = "config";
    doc["backend"] = cfg.backend;
    if (cfg.backend == "remote") {
        doc["remote"] = {{"endpoint", cfg.remote.endpoint},
                         {"model", cfg.remote.model},
                         {"timeout_seconds", cfg.remote.timeout_seconds},
                         {"retries", cfg.remote.retries}};
    }
    doc["alpha"] = cfg.alpha;
    if (cfg.alpha_adv) doc["alpha_adv"] = *cfg.alpha_adv;
    doc["seed"] = cfg.seed;
    doc["tau"] = cfg.tau;
    doc["panel"] = {{"pool", 7},
                    {"experts", cfg.ace.m},
                    {"runs", cfg.ace.runs},
                    {"personas", cfg.ace.personas},
                    {"detail", detail_name(cfg.ace.detail)}};
    if (!cfg.ace.weights.empty()) doc["panel"]["weights"] = cfg.ace.weights;
    doc["jobs"] = cfg.jobs;
    return doc;
}

Config config_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
    Config cfg;
    if (doc.contains("backend")) cfg.backend = doc.at("backend").get<std::string>();
    if (doc.contains("remote")) {
        const auto& r = doc.at("remote");
        if (r.contains("endpoint")) cfg.remote.endpoint = r.at("endpoint").get<std::string>();
        if (r.contains("model")) cfg.remote.model = r.at("model").get<std::string>();
        if (r.contains("timeout_seconds")) {
            cfg.remote.timeout_seconds = r.at("timeout_seconds").get<int>();
        }
        if (r.contains("retries")) cfg.remote.retries = r.at("retries").get<int>();
    }
    if (doc.contains("alpha")) cfg.alpha = doc.at("alpha").get<double>();
    if (doc.contains("alpha_adv")) cfg.alpha_adv = doc.at("alpha_adv").get<double>();
    if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("tau")) cfg.tau = doc.at("tau").get<double>();
    if (doc.contains("panel")) {
        const auto& p = doc.at("panel");
        if (p.contains("pool") && p.at("pool").get<int>() != 7) {
            throw std::invalid_argument("the built-in expert pool has exactly 7 members");
        }
        if (p.contains("experts")) cfg.ace.m = p.at("experts").get<int>();
        if (p.contains("runs")) cfg.ace.runs = p.at("runs").get<int>();
        if (p.contains("personas")) cfg.ace.personas = p.at("personas").get<int>();
        if (p.contains("weights")) {
            cfg.ace.weights = p.at("weights").get<std::vector<double>>();
        }
        if (p.contains("detail")) cfg.ace.detail = parse_detail(p.at("detail").get<std::string>());
    }
    if (doc.contains("jobs")) cfg.jobs = doc.at("jobs").get<int>();
    validate(cfg);
    return cfg;
}

std::unique_ptr<ExpertBackend> make_backend(const Config& cfg,
                                            const std::optional<CausalGraph>& truth) {
    validate(cfg);
    if (cfg.backend == "remote") {
        return std::make_unique<RemoteBackend>(cfg.remote);
    }
    if (!truth) {
        throw std::invalid_argument(
            "the simulated backend answers from a truth graph; pass --graph or switch to "
            "--backend remote");
    }
    return std::make_unique<SimulatedOracle>(OracleConfig{*truth, cfg.alpha, cfg.alpha_adv,
                                                          cfg.seed});
}

} // namespace treequery
