#pragma once

#include <cstdint>
#include <optional>

#include "treequery/backend.hpp"
#include "treequery/graph.hpp"

namespace treequery {

struct OracleConfig {
    CausalGraph truth; // hidden-free
    double alpha = 0.0; // per-expert error probability, in [0, 0.5)
    std::optional<double> alpha_adv; // flip probability under personas; defaults to alpha
    std::uint64_t seed = 0;
};

/// Ground-truth Yes/No for a query against the given graph.
Conclusion oracle_answer(const CausalGraph& truth, const QuerySpec& q);

/// Expert backend answering from a ground-truth graph with independent
/// per-seat flips at probability alpha (alpha_adv under personas). Every
/// draw is a pure function of (seed, query identity, run, persona, seat),
/// so results are bit-reproducible under any evaluation order and whole
/// panels can be counted by the flip kernel.
class SimulatedOracle : public ExpertBackend {
public:
    explicit SimulatedOracle(OracleConfig cfg);

    ExpertJudgment query_expert(const QuerySpec& q, const ExpertProfile& e, int seat, int run,
                                const AdversarialContext* adv) override;
    std::string adv_gen(Persona persona, const std::string& base_query,
                        const std::string& original_answer) override;
    std::optional<int> panel_yes_count(const QuerySpec& q, const std::vector<ExpertProfile>& seats,
                                       int run, const std::optional<Persona>& persona) override;

    const OracleConfig& config() const { return cfg_; }

    /// Hash key identifying one panel run of one query; seat draws stream
    /// off this key.
    std::uint64_t run_key(const QuerySpec& q, int run, const std::optional<Persona>& persona) const;

    /// Single-shot answer for the direct baseline: the true pair relation,
    /// replaced by a uniformly chosen wrong label with probability alpha.
    Relation direct_relation(const std::string& x1, const std::string& x2) const;

private:
    OracleConfig cfg_;
    std::uint64_t base_threshold_ = 0;
    std::uint64_t adv_threshold_ = 0;
};

} // namespace treequery
