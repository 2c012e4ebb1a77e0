#include "treequery/simulated.hpp"

#include <limits>
#include <stdexcept>

#include "treequery/hash.hpp"
#include "treequery/kernel.hpp"

namespace treequery {

Conclusion oracle_answer(const CausalGraph& truth, const QuerySpec& q) {
    validate_query(q);
    switch (q.query_type) {
        case QueryType::BackdoorPath:
            return has_backdoor_path(truth, q.x1, q.x2) ? Conclusion::Yes : Conclusion::No;
        case QueryType::Independence:
            return pair_relation(truth, q.x1, q.x2) == Relation::Independent ? Conclusion::Yes
                                                                             : Conclusion::No;
        case QueryType::LatentConfounder:
            return pair_relation(truth, q.x1, q.x2) == Relation::Latent ? Conclusion::Yes
                                                                        : Conclusion::No;
        case QueryType::CausalDirection: {
            const Relation want =
                q.polarity == Polarity::Forward ? Relation::Forward : Relation::Backward;
            return pair_relation(truth, q.x1, q.x2) == want ? Conclusion::Yes : Conclusion::No;
        }
    }
    throw std::logic_error("unhandled query type");
}

SimulatedOracle::SimulatedOracle(OracleConfig cfg) : cfg_(std::move(cfg)) {
    if (!cfg_.truth.hidden().empty())
        throw std::invalid_argument("simulated oracle needs a hidden-free truth graph");
    if (cfg_.alpha < 0.0 || cfg_.alpha >= 0.5)
        throw std::invalid_argument("alpha must lie in [0, 0.5)");
    const double adv = cfg_.alpha_adv.value_or(cfg_.alpha);
    if (adv < 0.0 || adv > 1.0) throw std::invalid_argument("alpha_adv must lie in [0, 1]");
    base_threshold_ = kernel::flip_threshold(cfg_.alpha);
    adv_threshold_ = kernel::flip_threshold(adv);
}

std::uint64_t SimulatedOracle::run_key(const QuerySpec& q, int run,
                                       const std::optional<Persona>& persona) const {
    using namespace hash;
    std::uint64_t h = kFnvOffset;
    h = fnv1a(h, cfg_.seed);
    h = fnv1a(h, std::string_view(q.x1));
    h = fnv1a(h, std::string_view(q.x2));
    h = fnv1a(h, static_cast<std::uint64_t>(q.query_type));
    const Polarity pol =
        q.query_type == QueryType::CausalDirection ? q.polarity : Polarity::Forward;
    h = fnv1a(h, static_cast<std::uint64_t>(pol));
    h = fnv1a(h, static_cast<std::uint64_t>(q.branch));
    h = fnv1a(h, static_cast<std::uint64_t>(run));
    h = fnv1a(h, persona ? static_cast<std::uint64_t>(*persona)
                         : std::numeric_limits<std::uint64_t>::max());
    return mix64(h);
}

ExpertJudgment SimulatedOracle::query_expert(const QuerySpec& q, const ExpertProfile& e, int seat,
                                             int run, const AdversarialContext* adv) {
    const Conclusion truth = oracle_answer(cfg_.truth, q);
    const std::optional<Persona> persona =
        adv ? std::optional<Persona>(adv->persona) : std::nullopt;
    const std::uint64_t key = run_key(q, run, persona);
    const std::uint64_t threshold = persona ? adv_threshold_ : base_threshold_;
    const bool flip = kernel::seat_flip(key, seat, threshold);
    const Conclusion out =
        flip ? (truth == Conclusion::Yes ? Conclusion::No : Conclusion::Yes) : truth;
    return ExpertJudgment{e.id, out, ""};
}

std::string SimulatedOracle::adv_gen(Persona persona, const std::string&, const std::string&) {
    return "[simulated adversarial argument from " + persona_name(persona) + "]";
}

Relation SimulatedOracle::direct_relation(const std::string& x1, const std::string& x2) const {
    const Relation truth = pair_relation(cfg_.truth, x1, x2);
    using namespace hash;
    std::uint64_t h = kFnvOffset;
    h = fnv1a(h, cfg_.seed);
    h = fnv1a(h, std::string_view("direct"));
    h = fnv1a(h, std::string_view(x1));
    h = fnv1a(h, std::string_view(x2));
    const std::uint64_t key = mix64(h);
    if (!kernel::seat_flip(key, 0, base_threshold_)) return truth;
    Relation wrong[3];
    int count = 0;
    for (Relation r : {Relation::Independent, Relation::Latent, Relation::Forward,
                       Relation::Backward}) {
        if (r != truth) wrong[count++] = r;
    }
    return wrong[stream_draw(key, 1) % 3];
}

std::optional<int> SimulatedOracle::panel_yes_count(const QuerySpec& q,
                                                    const std::vector<ExpertProfile>& seats,
                                                    int run,
                                                    const std::optional<Persona>& persona) {
    const int m = static_cast<int>(seats.size());
    const Conclusion truth = oracle_answer(cfg_.truth, q);
    const std::uint64_t key = run_key(q, run, persona);
    const std::uint64_t threshold = persona ? adv_threshold_ : base_threshold_;
    const int flips = kernel::count_flips(key, m, threshold);
    return truth == Conclusion::Yes ? m - flips : flips;
}

} // namespace treequery
