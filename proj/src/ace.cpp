#include "treequery/ace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace treequery {

ConsensusStats baseline_consensus(const std::vector<Conclusion>& conclusions) {
    if (conclusions.empty()) throw std::invalid_argument("consensus over empty conclusion list");
    ConsensusStats s;
    s.n_yes = static_cast<int>(std::count(conclusions.begin(), conclusions.end(), Conclusion::Yes));
    s.n_no = static_cast<int>(conclusions.size()) - s.n_yes;
    const double n = static_cast<double>(conclusions.size());
    s.p0_raw = std::max(s.n_yes, s.n_no) / n;
    s.p0 = 2.0 * s.p0_raw - 1.0;
    s.y_star = s.n_yes > s.n_no ? Conclusion::Yes : Conclusion::No;
    return s;
}

double persona_consistency(const std::vector<Conclusion>& perturbed, Conclusion y_star) {
    if (perturbed.empty()) throw std::invalid_argument("consistency over empty conclusion list");
    const auto aligned = std::count(perturbed.begin(), perturbed.end(), y_star);
    return static_cast<double>(aligned) / static_cast<double>(perturbed.size());
}

double confidence_score(const ConsensusStats& stats, const std::vector<double>& p_js,
                        const std::vector<double>& weights) {
    if (p_js.size() != weights.size())
        throw std::invalid_argument("persona consistency and weight counts differ");
    if (stats.p0_raw <= 0.0) throw std::invalid_argument("consensus p0_raw must be positive");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("negative persona weight");
        sum += w;
    }
    if (!weights.empty() && std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("persona weights must sum to 1");
    double penalty = 0.0;
    for (std::size_t j = 0; j < p_js.size(); ++j) {
        penalty += weights[j] * std::abs(p_js[j] - stats.p0_raw) / stats.p0_raw;
    }
    return stats.p0 * (1.0 - penalty);
}

namespace {

struct RunResult {
    PanelRun record;
    std::string representative_answer;
};

std::string synthesized_answer(Conclusion c) { return "Answer: '" + conclusion_name(c) + "'"; }

RunResult run_panel(ExpertBackend& backend, const QuerySpec& q,
                    const std::vector<ExpertProfile>& seats, int run,
                    const AdversarialContext* adv, LogDetail detail) {
    const std::optional<Persona> persona =
        adv ? std::optional<Persona>(adv->persona) : std::nullopt;
    PanelRun rec;
    rec.run = run;
    rec.persona = persona;

    if (detail == LogDetail::None) {
        if (auto fast = backend.panel_yes_count(q, seats, run, persona)) {
            rec.yes = *fast;
            rec.no = static_cast<int>(seats.size()) - *fast;
            rec.conclusion = rec.yes > rec.no ? Conclusion::Yes : Conclusion::No;
            return {std::move(rec), synthesized_answer(rec.conclusion)};
        }
    }

    std::vector<Conclusion> parsed;
    std::vector<std::string> replies;
    for (int i = 0; i < static_cast<int>(seats.size()); ++i) {
        SeatRecord seat;
        seat.expert_id = seats[i].id;
        try {
            auto judgment = backend.query_expert(q, seats[i], i, run, adv);
            seat.conclusion = judgment.conclusion;
            parsed.push_back(judgment.conclusion);
            replies.push_back(judgment.raw_text);
            if (judgment.conclusion == Conclusion::Yes) {
                ++rec.yes;
            } else {
                ++rec.no;
            }
            if (detail == LogDetail::Full) {
                const std::string inner = build_expert_prompt(q, seats[i]);
                seat.prompt = adv ? reassessment_prompt(inner, adv->original_answer, adv->argument)
                                  : ace_question_prompt(inner);
                seat.reply = judgment.raw_text;
            }
        } catch (const UnparseableAnswer&) {
            ++rec.abstained;
        }
        if (detail != LogDetail::None) rec.seats.push_back(std::move(seat));
    }
    if (parsed.empty())
        throw std::runtime_error("all experts abstained on " + query_type_name(q.query_type) +
                                 " query for (" + q.x1 + ", " + q.x2 + ")");
    rec.conclusion = majority_vote(parsed) == 1 ? Conclusion::Yes : Conclusion::No;

    std::string representative = synthesized_answer(rec.conclusion);
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        if (parsed[i] == rec.conclusion && !replies[i].empty()) {
            representative = replies[i];
            break;
        }
    }
    return {std::move(rec), std::move(representative)};
}

} // namespace

AceOutput mes_ace(const QuerySpec& q, const AceParams& params, ExpertBackend& backend) {
    validate_query(q);
    if (params.runs < 1) throw std::invalid_argument("ace needs at least one run");
    if (params.personas < 0 || params.personas > 3)
        throw std::invalid_argument("persona count must lie in [0, 3]");
    std::vector<double> weights = params.weights;
    if (weights.empty() && params.personas > 0)
        weights.assign(params.personas, 1.0 / params.personas);
    if (static_cast<int>(weights.size()) != params.personas)
        throw std::invalid_argument("weight count does not match persona count");

    const auto& pool = params.pool ? *params.pool : default_pool();
    const auto base = routing_rules(q.query_type, pool);
    const auto seats = clinic_select(base, pool, params.m);

    AceLog log;
    log.query = q;
    for (const auto& e : seats) log.expert_ids.push_back(e.id);
    const std::string x_q = base_prompt(q);
    if (params.detail != LogDetail::None) log.base_query = x_q;
    log.weights = weights;

    std::vector<Conclusion> baseline;
    std::vector<std::string> answers;
    for (int run = 0; run < params.runs; ++run) {
        auto result = run_panel(backend, q, seats, run, nullptr, params.detail);
        baseline.push_back(result.record.conclusion);
        answers.push_back(std::move(result.representative_answer));
        log.had_abstentions = log.had_abstentions || result.record.abstained > 0;
        log.baseline.push_back(std::move(result.record));
    }
    log.stats = baseline_consensus(baseline);

    std::vector<double> p_js;
    for (int j = 0; j < params.personas; ++j) {
        const auto persona = static_cast<Persona>(j);
        PersonaTrace trace;
        trace.persona = persona;
        std::vector<Conclusion> perturbed;
        for (int run = 0; run < params.runs; ++run) {
            AdversarialContext ctx;
            ctx.persona = persona;
            ctx.original_answer = answers[run];
            ctx.argument = backend.adv_gen(persona, x_q, ctx.original_answer);
            auto result = run_panel(backend, q, seats, run, &ctx, params.detail);
            if (params.detail == LogDetail::Full)
                result.record.adversarial_argument = ctx.argument;
            perturbed.push_back(result.record.conclusion);
            log.had_abstentions = log.had_abstentions || result.record.abstained > 0;
            trace.runs.push_back(std::move(result.record));
        }
        trace.p_j = persona_consistency(perturbed, log.stats.y_star);
        p_js.push_back(trace.p_j);
        log.personas.push_back(std::move(trace));
    }

    log.confidence = confidence_score(log.stats, p_js, weights);
    log.y_hat = log.stats.y_star == Conclusion::Yes ? 1 : 0;
    return AceOutput{log.y_hat, log.confidence, std::move(log)};
}

} // namespace treequery
