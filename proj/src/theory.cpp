#include "treequery/theory.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "treequery/hash.hpp"
#include "treequery/simulated.hpp"
#include "treequery/tree.hpp"

namespace treequery {

namespace {

std::uint64_t trial_seed(std::uint64_t seed, Relation truth, int trial) {
    std::uint64_t h = hash::fnv1a(hash::kFnvOffset, seed);
    h = hash::fnv1a(h, std::string_view("identifiability"));
    h = hash::fnv1a(h, std::string_view(relation_name(truth)));
    h = hash::fnv1a(h, static_cast<std::uint64_t>(trial));
    return hash::mix64(h);
}

CausalGraph two_node_truth(Relation truth) {
    CausalGraph g({"A", "B"});
    switch (truth) {
        case Relation::Forward: g.add_directed("A", "B"); break;
        case Relation::Backward: g.add_directed("B", "A"); break;
        case Relation::Latent: g.add_bidirected("A", "B"); break;
        case Relation::Independent: break;
        default:
            throw std::invalid_argument("monte carlo needs one of the four definite relations");
    }
    return g;
}

} // namespace

void validate(const ReliabilityParams& params) {
    if (params.stages < 1) {
        throw std::invalid_argument("stage count must be at least 1, got " +
                                    std::to_string(params.stages));
    }
    if (params.experts < 1) {
        throw std::invalid_argument("panel size must be at least 1, got " +
                                    std::to_string(params.experts));
    }
    if (!(params.alpha >= 0.0) || !(params.alpha < 0.5)) {
        throw std::invalid_argument("expert error rate must lie in [0, 0.5), got " +
                                    std::to_string(params.alpha));
    }
    if (!(params.edges >= 0.0)) {
        throw std::invalid_argument("edge count must be nonnegative, got " +
                                    std::to_string(params.edges));
    }
    if (!(params.target > 0.0) || !(params.target < 1.0)) {
        throw std::invalid_argument("target probability must lie in (0, 1), got " +
                                    std::to_string(params.target));
    }
}

double pairwise_bound(const ReliabilityParams& params) {
    const double gap = 0.5 - params.alpha;
    const double raw = 1.0 - params.stages * std::exp(-2.0 * params.experts * gap * gap);
    return std::clamp(raw, 0.0, 1.0);
}

double expected_edges(const ReliabilityParams& params) {
    return params.edges * pairwise_bound(params);
}

int required_experts(double target, int stages, double alpha) {
    if (stages < 1) {
        throw std::invalid_argument("stage count must be at least 1, got " +
                                    std::to_string(stages));
    }
    if (!(target > 0.0) || !(target < 1.0)) {
        throw std::invalid_argument("target probability must lie in (0, 1), got " +
                                    std::to_string(target));
    }
    if (!(alpha >= 0.0) || !(alpha < 0.5)) {
        throw std::invalid_argument("expert error rate must lie in [0, 0.5), got " +
                                    std::to_string(alpha));
    }
    const double gap = 0.5 - alpha;
    const double need = -std::log((1.0 - target) / stages) / (2.0 * gap * gap);
    const double rounded = std::ceil(need);
    if (rounded < 1.0) return 1;
    return static_cast<int>(rounded);
}

MonteCarloResult monte_carlo_identifiability(Relation truth, const ReliabilityParams& params,
                                             int trials, std::uint64_t seed, int jobs,
                                             const AceParams* ace) {
    validate(params);
    if (trials < 1) {
        throw std::invalid_argument("trial count must be at least 1, got " +
                                    std::to_string(trials));
    }
    if (jobs < 1) {
        throw std::invalid_argument("job count must be at least 1, got " + std::to_string(jobs));
    }

    // Majority voting only, unless the caller asks for the full pipeline.
    AceParams panel;
    if (ace != nullptr) {
        panel = *ace;
    } else {
        panel.m = params.experts;
        panel.runs = 1;
        panel.personas = 0;
        panel.weights.clear();
    }
    panel.detail = LogDetail::None;

    const CausalGraph graph = two_node_truth(truth);
    const std::vector<std::string> variables = graph.nodes();
    const double tau = 0.7;

    std::vector<std::uint8_t> hit(static_cast<std::size_t>(trials), 0);
    std::vector<double> confidence(static_cast<std::size_t>(trials), 0.0);
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(trials));
    auto work = [&](std::size_t idx) {
        try {
            SimulatedOracle backend(
                {graph, params.alpha, std::nullopt, trial_seed(seed, truth, static_cast<int>(idx))});
            const PairDecision d = tree_query("A", "B", variables, tau, panel, backend);
            hit[idx] = d.relation == truth ? 1 : 0;
            confidence[idx] = d.confidence;
        } catch (...) {
            failures[idx] = std::current_exception();
        }
    };

    const std::size_t total = static_cast<std::size_t>(trials);
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), total);
    if (workers <= 1) {
        for (std::size_t idx = 0; idx < total; ++idx) work(idx);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            threads.emplace_back([&] {
                for (std::size_t idx = next.fetch_add(1); idx < total; idx = next.fetch_add(1)) {
                    work(idx);
                }
            });
        }
        for (auto& t : threads) t.join();
    }
    for (std::size_t idx = 0; idx < total; ++idx) {
        if (failures[idx]) std::rethrow_exception(failures[idx]);
    }

    // Serial reduction keeps the result independent of the job count.
    MonteCarloResult result;
    result.relation = truth;
    result.trials = trials;
    double conf_sum = 0.0;
    for (std::size_t idx = 0; idx < total; ++idx) {
        result.correct += hit[idx];
        conf_sum += confidence[idx];
    }
    result.empirical = static_cast<double>(result.correct) / trials;
    result.std_error = std::sqrt(result.empirical * (1.0 - result.empirical) / trials);
    result.mean_confidence = conf_sum / trials;
    return result;
}

SweepSpec sweep_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw std::invalid_argument("sweep spec must be a JSON object");
    auto as_array = [](const nlohmann::json& value) {
        return value.is_array() ? value : nlohmann::json::array({value});
    };
    SweepSpec spec;
    for (const auto& v : as_array(doc.at("m"))) spec.experts.push_back(v.get<int>());
    for (const auto& v : as_array(doc.at("alpha"))) spec.alphas.push_back(v.get<double>());
    for (const auto& v : as_array(doc.at("M"))) spec.stages.push_back(v.get<int>());
    spec.trials = doc.at("trials").get<int>();
    if (doc.contains("relations")) {
        for (const auto& v : as_array(doc.at("relations"))) {
            spec.relations.push_back(parse_relation(v.get<std::string>()));
        }
    }
    if (spec.experts.empty() || spec.alphas.empty() || spec.stages.empty()) {
        throw std::invalid_argument("sweep grids must be non-empty");
    }
    if (spec.trials < 1) {
        throw std::invalid_argument("trial count must be at least 1, got " +
                                    std::to_string(spec.trials));
    }
    for (int m : spec.experts) {
        ReliabilityParams probe;
        probe.experts = m;
        validate(probe);
    }
    for (double a : spec.alphas) {
        ReliabilityParams probe;
        probe.alpha = a;
        validate(probe);
    }
    for (int s : spec.stages) {
        ReliabilityParams probe;
        probe.stages = s;
        validate(probe);
    }
    for (Relation r : spec.relations) {
        two_node_truth(r);
    }
    return spec;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::uint64_t seed, int jobs) {
    static const std::vector<Relation> kAll = {Relation::Independent, Relation::Latent,
                                              Relation::Forward, Relation::Backward};
    const std::vector<Relation>& relations = spec.relations.empty() ? kAll : spec.relations;

    std::map<std::tuple<int, double, Relation>, MonteCarloResult> cache;
    std::vector<SweepRow> rows;
    for (int m : spec.experts) {
        for (double alpha : spec.alphas) {
            for (int stages : spec.stages) {
                for (Relation relation : relations) {
                    ReliabilityParams params;
                    params.experts = m;
                    params.alpha = alpha;
                    params.stages = stages;

                    const auto key = std::make_tuple(m, alpha, relation);
                    auto it = cache.find(key);
                    if (it == cache.end()) {
                        std::uint64_t h = hash::fnv1a(hash::kFnvOffset, seed);
                        h = hash::fnv1a(h, std::string_view("sweep"));
                        h = hash::fnv1a(h, static_cast<std::uint64_t>(m));
                        char alpha_text[32];
                        std::snprintf(alpha_text, sizeof(alpha_text), "%.17g", alpha);
                        h = hash::fnv1a(h, std::string_view(alpha_text));
                        it = cache
                                 .emplace(key, monte_carlo_identifiability(
                                                   relation, params, spec.trials, hash::mix64(h),
                                                   jobs))
                                 .first;
                    }

                    SweepRow row;
                    row.experts = m;
                    row.alpha = alpha;
                    row.stages = stages;
                    row.trials = spec.trials;
                    row.relation = relation;
                    row.bound = pairwise_bound(params);
                    row.empirical = it->second.empirical;
                    row.std_error = it->second.std_error;
                    rows.push_back(row);
                }
            }
        }
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "m,alpha,M,trials,relation,bound,empirical,stderr\n";
    char line[160];
    for (const auto& row : rows) {
        std::snprintf(line, sizeof(line), "%d,%g,%d,%d,%s,%.6f,%.6f,%.6f\n", row.experts,
                      row.alpha, row.stages, row.trials, relation_name(row.relation).c_str(),
                      row.bound, row.empirical, row.std_error);
        out += line;
    }
    return out;
}

} // namespace treequery
