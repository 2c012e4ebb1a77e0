#include "treequery/tree.hpp"

#include <algorithm>
#include <atomic>
#include <optional>
#include <stdexcept>
#include <thread>

namespace treequery {

namespace {

// Stage order doubles as the tie-break priority among the four positive
// labels; negatives rank -1 and never reach the final argmax.
int stage_rank(RelationLabel label) {
    switch (label) {
        case RelationLabel::Independent: return 0;
        case RelationLabel::Latent: return 1;
        case RelationLabel::Forward: return 2;
        case RelationLabel::Backward: return 3;
        default: return -1;
    }
}

Relation final_relation(RelationLabel label) {
    switch (label) {
        case RelationLabel::Independent: return Relation::Independent;
        case RelationLabel::Latent: return Relation::Latent;
        case RelationLabel::Forward: return Relation::Forward;
        default: return Relation::Backward;
    }
}

int branch_rank(Branch b) { return b == Branch::AfterBlock ? 0 : 1; }

} // namespace

std::string relation_label_name(RelationLabel label) {
    switch (label) {
        case RelationLabel::Independent: return "independent";
        case RelationLabel::NotIndependent: return "not independent";
        case RelationLabel::Latent: return "<->";
        case RelationLabel::NotLatent: return "not <->";
        case RelationLabel::Forward: return "->";
        case RelationLabel::NotForward: return "not ->";
        case RelationLabel::Backward: return "<-";
        default: return "not <-";
    }
}

RelationLabel parse_relation_label(const std::string& text) {
    static const std::pair<const char*, RelationLabel> table[] = {
        {"independent", RelationLabel::Independent},
        {"not independent", RelationLabel::NotIndependent},
        {"<->", RelationLabel::Latent},
        {"not <->", RelationLabel::NotLatent},
        {"->", RelationLabel::Forward},
        {"not ->", RelationLabel::NotForward},
        {"<-", RelationLabel::Backward},
        {"not <-", RelationLabel::NotBackward},
    };
    for (const auto& [name, label] : table) {
        if (text == name) return label;
    }
    throw std::invalid_argument("unknown relation label: " + text);
}

RelationLabel map_to_relation(const QuerySpec& q, int y_hat) {
    if (q.query_type == QueryType::BackdoorPath) {
        throw std::invalid_argument("backdoor probes gate branches and carry no relation label");
    }
    if (y_hat != 0 && y_hat != 1) {
        throw std::invalid_argument("verdict must be 0 or 1");
    }
    const bool yes = y_hat == 1;
    switch (q.query_type) {
        case QueryType::Independence:
            return yes ? RelationLabel::Independent : RelationLabel::NotIndependent;
        case QueryType::LatentConfounder:
            return yes ? RelationLabel::Latent : RelationLabel::NotLatent;
        default:
            if (q.polarity == Polarity::Forward) {
                return yes ? RelationLabel::Forward : RelationLabel::NotForward;
            }
            return yes ? RelationLabel::Backward : RelationLabel::NotBackward;
    }
}

CheckResults tree_query_checks(const std::string& x1, const std::string& x2,
                               const std::vector<std::string>& variables,
                               const AceParams& params, ExpertBackend& backend) {
    QuerySpec root;
    root.query_type = QueryType::BackdoorPath;
    root.branch = Branch::Root;
    root.x1 = x1;
    root.x2 = x2;
    root.variables = variables;

    CheckResults out;
    auto bd = mes_ace(root, params, backend);
    out.have_backdoor = bd.y_hat == 1;
    out.c_bd = bd.confidence;
    out.backdoor_log = std::move(bd.log);

    // The shape never depends on the answers: every pair costs the same one
    // backdoor probe plus four findings under each conceptual branch.
    struct Leaf {
        QueryType type;
        Polarity polarity;
    };
    const Leaf leaves[] = {
        {QueryType::Independence, Polarity::Forward},
        {QueryType::LatentConfounder, Polarity::Forward},
        {QueryType::CausalDirection, Polarity::Forward},
        {QueryType::CausalDirection, Polarity::Backward},
    };
    for (Branch b : {Branch::AfterBlock, Branch::NoBackdoor}) {
        for (const Leaf& leaf : leaves) {
            QuerySpec q;
            q.query_type = leaf.type;
            q.polarity = leaf.polarity;
            q.branch = b;
            q.x1 = x1;
            q.x2 = x2;
            q.variables = variables;
            auto res = mes_ace(q, params, backend);
            out.outcomes.push_back({b, map_to_relation(q, res.y_hat), res.confidence});
            out.outcome_logs.push_back(std::move(res.log));
        }
    }
    return out;
}

std::pair<Relation, double> decision_rule(bool have_backdoor, double c_bd,
                                          const std::vector<BranchOutcome>& outcomes,
                                          double tau) {
    std::vector<Branch> branches;
    if (c_bd >= tau) {
        branches.push_back(have_backdoor ? Branch::AfterBlock : Branch::NoBackdoor);
    } else {
        branches = {Branch::AfterBlock, Branch::NoBackdoor};
    }

    struct Candidate {
        RelationLabel label;
        double confidence;
        Branch branch;
    };
    std::vector<Candidate> collected;

    for (Branch b : branches) {
        std::vector<const BranchOutcome*> ind, lat, dir;
        for (const auto& o : outcomes) {
            if (o.branch != b) continue;
            switch (o.relation) {
                case RelationLabel::Independent:
                case RelationLabel::NotIndependent: ind.push_back(&o); break;
                case RelationLabel::Latent:
                case RelationLabel::NotLatent: lat.push_back(&o); break;
                default: dir.push_back(&o); break;
            }
        }

        if (!ind.empty()) {
            const BranchOutcome* r = ind.front();
            collected.push_back({r->relation, r->confidence, b});
            if (r->relation == RelationLabel::Independent && r->confidence >= tau) continue;
        }
        if (!lat.empty()) {
            const BranchOutcome* r = lat.front();
            collected.push_back({r->relation, r->confidence, b});
            if (r->relation == RelationLabel::Latent && r->confidence >= tau) continue;
        }

        std::vector<const BranchOutcome*> positive;
        const BranchOutcome* not_fwd = nullptr;
        const BranchOutcome* not_bwd = nullptr;
        for (const BranchOutcome* r : dir) {
            if (r->relation == RelationLabel::Forward || r->relation == RelationLabel::Backward) {
                positive.push_back(r);
            } else if (r->relation == RelationLabel::NotForward && not_fwd == nullptr) {
                not_fwd = r;
            } else if (r->relation == RelationLabel::NotBackward && not_bwd == nullptr) {
                not_bwd = r;
            }
        }
        if (!positive.empty()) {
            for (const BranchOutcome* r : positive) {
                collected.push_back({r->relation, r->confidence, b});
            }
        } else if (not_fwd != nullptr && not_bwd != nullptr) {
            // Both directions were denied; trust the weaker denial less and
            // flip it into a positive claim.
            if (not_fwd->confidence <= not_bwd->confidence) {
                collected.push_back({RelationLabel::Forward, 1.0 - not_fwd->confidence, b});
            } else {
                collected.push_back({RelationLabel::Backward, 1.0 - not_bwd->confidence, b});
            }
        }
    }

    const Candidate* best = nullptr;
    for (const Candidate& cand : collected) {
        const int stage = stage_rank(cand.label);
        if (stage < 0) continue;
        if (best == nullptr) {
            best = &cand;
            continue;
        }
        const int best_stage = stage_rank(best->label);
        if (cand.confidence > best->confidence ||
            (cand.confidence == best->confidence &&
             (stage < best_stage ||
              (stage == best_stage && branch_rank(cand.branch) < branch_rank(best->branch))))) {
            best = &cand;
        }
    }
    if (best == nullptr) return {Relation::Unknown, 0.0};
    return {final_relation(best->label), best->confidence};
}

PairDecision tree_query(const std::string& x1, const std::string& x2,
                        const std::vector<std::string>& variables, double tau,
                        const AceParams& params, ExpertBackend& backend) {
    if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("tau must lie in [0, 1]");
    auto checks = tree_query_checks(x1, x2, variables, params, backend);
    auto [relation, confidence] =
        decision_rule(checks.have_backdoor, checks.c_bd, checks.outcomes, tau);

    PairDecision d;
    d.x1 = x1;
    d.x2 = x2;
    d.relation = relation;
    d.confidence = confidence;
    d.tau = tau;
    d.have_backdoor = checks.have_backdoor;
    d.backdoor_confidence = checks.c_bd;
    d.outcomes = std::move(checks.outcomes);
    d.backdoor_log = std::move(checks.backdoor_log);
    d.outcome_logs = std::move(checks.outcome_logs);
    return d;
}

DiscoveryResult discover_graph(const std::vector<std::string>& variables, double tau,
                               const AceParams& params, ExpertBackend& backend, int jobs) {
    if (variables.size() < 2) throw std::invalid_argument("discovery needs at least two variables");
    if (jobs < 1) throw std::invalid_argument("jobs must be positive");

    // Constructing the graph up front also rejects duplicate names.
    DiscoveryResult out{CausalGraph(variables), {}, {}};

    std::vector<std::string> order(variables);
    std::sort(order.begin(), order.end());
    std::vector<std::pair<std::string, std::string>> pairs;
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            pairs.emplace_back(order[i], order[j]);
        }
    }

    std::vector<std::optional<PairDecision>> slots(pairs.size());
    std::vector<std::exception_ptr> failures(pairs.size());
    auto work = [&](std::size_t idx) {
        try {
            slots[idx] =
                tree_query(pairs[idx].first, pairs[idx].second, variables, tau, params, backend);
        } catch (...) {
            failures[idx] = std::current_exception();
        }
    };

    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(jobs), pairs.size());
    if (workers <= 1) {
        for (std::size_t idx = 0; idx < pairs.size(); ++idx) work(idx);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            threads.emplace_back([&] {
                for (std::size_t idx = next.fetch_add(1); idx < pairs.size();
                     idx = next.fetch_add(1)) {
                    work(idx);
                }
            });
        }
        for (auto& t : threads) t.join();
    }
    for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
        if (failures[idx]) std::rethrow_exception(failures[idx]);
    }

    for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
        PairDecision& d = *slots[idx];
        switch (d.relation) {
            case Relation::Forward: out.graph.add_directed(d.x1, d.x2); break;
            case Relation::Backward: out.graph.add_directed(d.x2, d.x1); break;
            case Relation::Latent: out.graph.add_bidirected(d.x1, d.x2); break;
            default: break;
        }
        out.decisions.emplace(pairs[idx], std::move(d));
    }

    // Pairwise answers can disagree globally; keep the graph but say so.
    auto cycle = out.graph.directed_cycle();
    if (!cycle.empty()) {
        std::string msg = "discovered graph contains a directed cycle: ";
        for (std::size_t i = 0; i < cycle.size(); ++i) {
            if (i > 0) msg += " -> ";
            msg += cycle[i];
        }
        out.warnings.push_back(std::move(msg));
    }
    return out;
}

nlohmann::json to_json(const PairDecision& d) {
    nlohmann::json doc;
    doc["x1"] = d.x1;
    doc["x2"] = d.x2;
    doc["relation"] = relation_name(d.relation);
    doc["confidence"] = d.confidence;
    doc["tau"] = d.tau;
    doc["backdoor"] = {{"present", d.have_backdoor},
                       {"confidence", d.backdoor_confidence},
                       {"log", to_json(d.backdoor_log)}};
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < d.outcomes.size(); ++i) {
        nlohmann::json entry;
        entry["branch"] = branch_name(d.outcomes[i].branch);
        entry["relation"] = relation_label_name(d.outcomes[i].relation);
        entry["confidence"] = d.outcomes[i].confidence;
        if (i < d.outcome_logs.size()) entry["log"] = to_json(d.outcome_logs[i]);
        arr.push_back(std::move(entry));
    }
    doc["outcomes"] = std::move(arr);
    return doc;
}

PairDecision pair_decision_from_json(const nlohmann::json& doc) {
    PairDecision d;
    d.x1 = doc.at("x1").get<std::string>();
    d.x2 = doc.at("x2").get<std::string>();
    d.relation = parse_relation(doc.at("relation").get<std::string>());
    d.confidence = doc.at("confidence").get<double>();
    d.tau = doc.at("tau").get<double>();
    const auto& bd = doc.at("backdoor");
    d.have_backdoor = bd.at("present").get<bool>();
    d.backdoor_confidence = bd.at("confidence").get<double>();
    d.backdoor_log = ace_log_from_json(bd.at("log"));
    for (const auto& entry : doc.at("outcomes")) {
        BranchOutcome o;
        o.branch = parse_branch(entry.at("branch").get<std::string>());
        o.relation = parse_relation_label(entry.at("relation").get<std::string>());
        o.confidence = entry.at("confidence").get<double>();
        d.outcomes.push_back(o);
        if (entry.contains("log")) d.outcome_logs.push_back(ace_log_from_json(entry.at("log")));
    }
    return d;
}

} // namespace treequery
