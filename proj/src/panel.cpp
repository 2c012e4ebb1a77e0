#include "treequery/panel.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <stdexcept>

#include <json.hpp>

namespace treequery {

std::string query_type_name(QueryType q) {
    switch (q) {
        case QueryType::BackdoorPath: return "backdoor_path";
        case QueryType::Independence: return "independence";
        case QueryType::LatentConfounder: return "latent_confounder";
        case QueryType::CausalDirection: return "causal_direction";
    }
    throw std::logic_error("unhandled query type");
}

std::string branch_name(Branch b) {
    switch (b) {
        case Branch::Root: return "root";
        case Branch::AfterBlock: return "after_block";
        case Branch::NoBackdoor: return "no_backdoor";
    }
    throw std::logic_error("unhandled branch");
}

std::string conclusion_name(Conclusion c) { return c == Conclusion::Yes ? "Yes" : "No"; }

std::string persona_name(Persona p) {
    switch (p) {
        case Persona::Contrarian: return "Contrarian";
        case Persona::Deceiver: return "Deceiver";
        case Persona::Hater: return "Hater";
    }
    throw std::logic_error("unhandled persona");
}

const std::vector<ExpertProfile>& default_pool() {
    static const std::vector<ExpertProfile> pool = {
        {0, "Graph-Theory Expert", "graph-theory",
         R"(As a causal graph theory expert, follow the framework below:

Specialization: causal graph structure, d-separation, path blocking.
Strengths: path analysis, cycle detection, d-separation evaluation.
Reasoning style: structured graph traversal.
Output requirement: binary decision based solely on graph structure.

Steps:
1. Construct the causal graph and identify all possible paths.
2. Apply d-separation to analyze path blocking.
3. Examine backdoor, frontdoor, and confounding paths.
4. Produce a clear Yes/No judgment based on graph structure.

Please follow graph-theoretic principles strictly and output only Yes or No.

{base_prompt})"},
        {1, "Statistical Expert", "statistical",
         R"(As a statistical inference expert, follow the framework below:

Specialization: statistical testing, independence assessment.
Strengths: independence tests, correlation analysis, confounder detection.
Reasoning style: probabilistic-statistical reasoning.
Output requirement: binary decision based on statistical evidence.

Steps:
1. Assess statistical correlation between variables.
2. Consider conditional independence and confounding factors.
3. Analyze statistical significance and robustness.
4. Produce a clear Yes/No judgment based on statistical reasoning.

Please apply statistical principles rigorously and output only Yes or No.

{base_prompt})"},
        {2, "Domain-Knowledge Expert", "domain-knowledge",
         R"(As a domain knowledge expert, follow the reasoning framework below:

Specialization: real-world scientific and commonsense causal reasoning.
Strengths: mechanism analysis, temporal logic, physical/social constraints.
Reasoning style: evidence-based inductive reasoning.
Output requirement: binary judgment based on domain knowledge.

Steps:
1. Apply relevant scientific knowledge and commonsense reasoning.
2. Evaluate physical/biological/social mechanism plausibility.
3. Assess temporal order and real-world feasibility.
4. Produce a clear Yes/No judgment grounded in domain knowledge.

Please integrate real-world understanding and output only Yes or No.

{base_prompt})"},
        {3, "Counterfactual Expert", "counterfactual",
         R"(As a counterfactual inference expert, follow the framework below:

Specialization: intervention analysis, potential outcomes, do-operator.
Strengths: counterfactual simulation and causal effect evaluation.
Reasoning style: counterfactual thought experiments.
Output requirement: binary judgment based on interventional reasoning.

Steps:
1. Construct the intervention scenario (do-operation).
2. Compare actual outcome with counterfactual outcome.
3. Analyze the distribution of potential outcomes.
4. Produce a clear Yes/No judgment based on intervention effects.

Please use counterfactual reasoning strictly and output only Yes or No.

{base_prompt})"},
        {4, "Temporal-Dynamics Expert", "temporal-dynamics",
         R"(As a temporal dynamics expert, follow the framework below:

Specialization: temporal order, dynamic processes.
Strengths: time-series reasoning, lag effects, dynamic causal structures.
Reasoning style: temporal causal analysis.
Output requirement: binary judgment based on temporal constraints.

Steps:
1. Check strict temporal ordering between cause and effect.
2. Analyze lagged effects and dynamic processes.
3. Evaluate time-series causal structures.
4. Produce a Yes/No judgment based on temporal logic.

Please focus on the temporal dimension and output only Yes or No.

{base_prompt})"},
        {5, "Mechanism-Modeling Expert", "mechanism-modeling",
         R"(As a mechanism modeling expert, follow the framework below:

Specialization: interpretable causal mechanisms and mediation.
Strengths: mediator analysis, mechanism consistency, functional relations.
Reasoning style: mechanism decomposition.
Output requirement: binary judgment based on mechanism completeness.

Steps:
1. Identify possible mediators and intermediate mechanisms.
2. Examine completeness of the causal chain.
3. Evaluate the plausibility of mechanism pathways.
4. Produce a clear Yes/No judgment based on mechanism reasoning.

Please focus on mechanism-level analysis and output only Yes or No.

{base_prompt})"},
        {6, "Robustness-Analysis Expert", "robustness-analysis",
         R"(As a robustness analysis expert, follow the framework below:

Specialization: robustness and sensitivity of causal claims.
Strengths: sensitivity tests, boundary-case evaluation, robustness validation.
Reasoning style: multi-scenario comparison.
Output requirement: binary judgment based on robustness assessment.

Steps:
1. Test result stability under varying assumptions.
2. Perform sensitivity and edge-case analysis.
3. Evaluate robustness of causal conclusions.
4. Produce a Yes/No judgment based on robustness.

Please evaluate the reliability of the conclusion and output only Yes or No.

{base_prompt})"},
    };
    return pool;
}

void validate_query(const QuerySpec& q) {
    if (q.x1 == q.x2)
        throw std::invalid_argument("query needs distinct nodes, got '" + q.x1 + "' twice");
    auto present = [&](const std::string& n) {
        return std::find(q.variables.begin(), q.variables.end(), n) != q.variables.end();
    };
    if (!present(q.x1)) throw std::invalid_argument("query node '" + q.x1 + "' not in variable list");
    if (!present(q.x2)) throw std::invalid_argument("query node '" + q.x2 + "' not in variable list");
    const bool root = q.branch == Branch::Root;
    if (root != (q.query_type == QueryType::BackdoorPath))
        throw std::invalid_argument("branch '" + branch_name(q.branch) +
                                    "' does not fit query type '" + query_type_name(q.query_type) + "'");
}

std::vector<ExpertProfile> routing_rules(QueryType query_type,
                                         const std::vector<ExpertProfile>& pool) {
    if (pool.empty()) throw std::invalid_argument("empty expert pool");
    std::vector<std::string> wanted;
    switch (query_type) {
        case QueryType::BackdoorPath:
            wanted = {"graph-theory", "statistical", "counterfactual"};
            break;
        case QueryType::Independence:
            wanted = {"statistical", "graph-theory", "robustness-analysis"};
            break;
        case QueryType::LatentConfounder:
            wanted = {"domain-knowledge", "counterfactual", "graph-theory", "mechanism-modeling"};
            break;
        case QueryType::CausalDirection:
            wanted = {"domain-knowledge", "temporal-dynamics", "counterfactual", "mechanism-modeling"};
            break;
    }
    std::vector<ExpertProfile> out;
    for (const auto& e : pool) {
        if (std::find(wanted.begin(), wanted.end(), e.specialty) != wanted.end()) out.push_back(e);
    }
    if (out.empty()) out = pool;
    std::sort(out.begin(), out.end(),
              [](const ExpertProfile& a, const ExpertProfile& b) { return a.id < b.id; });
    return out;
}

std::vector<ExpertProfile> clinic_select(const std::vector<ExpertProfile>& base,
                                         const std::vector<ExpertProfile>& pool, int m) {
    if (m < 1) throw std::invalid_argument("panel size must be at least 1");
    if (base.empty() || pool.empty()) throw std::invalid_argument("empty expert pool");
    std::vector<ExpertProfile> sorted_base = base;
    std::sort(sorted_base.begin(), sorted_base.end(),
              [](const ExpertProfile& a, const ExpertProfile& b) { return a.id < b.id; });
    std::vector<ExpertProfile> sorted_pool = pool;
    std::sort(sorted_pool.begin(), sorted_pool.end(),
              [](const ExpertProfile& a, const ExpertProfile& b) { return a.id < b.id; });
    std::vector<ExpertProfile> out;
    for (int i = 0; i < m && i < static_cast<int>(sorted_base.size()); ++i) {
        out.push_back(sorted_base[i]);
    }
    std::size_t wrap = 0;
    while (static_cast<int>(out.size()) < m) {
        out.push_back(sorted_pool[wrap % sorted_pool.size()]);
        ++wrap;
    }
    return out;
}

std::string question_sentence(const QuerySpec& q) {
    switch (q.query_type) {
        case QueryType::BackdoorPath:
            return "Is there a backdoor path between " + q.x1 + " and " + q.x2 + "?";
        case QueryType::Independence:
            return "Are " + q.x1 + " and " + q.x2 + " independent?";
        case QueryType::LatentConfounder:
            return "Is there a latent confounder between " + q.x1 + " and " + q.x2 + "?";
        case QueryType::CausalDirection:
            return q.polarity == Polarity::Forward ? "Does " + q.x1 + " cause " + q.x2 + "?"
                                                   : "Does " + q.x2 + " cause " + q.x1 + "?";
    }
    throw std::logic_error("unhandled query type");
}

std::string base_prompt(const QuerySpec& q) {
    validate_query(q);
    std::string vars;
    for (const auto& v : q.variables) {
        if (!vars.empty()) vars += ", ";
        vars += nlohmann::json(v).dump();
    }
    std::string text;
    if (q.branch == Branch::AfterBlock) {
        text += "Assume all backdoor paths between " + q.x1 + " and " + q.x2 +
                " have been blocked by adjustment.\n";
    }
    text += "In causal inference, consider the following variables: [" + vars + "]\n";
    text += question_sentence(q) + "\n";
    text += "Let us think step by step, and then output directly Yes or No.";
    return text;
}

std::string build_expert_prompt(const QuerySpec& q, const ExpertProfile& e) {
    static const std::string placeholder = "{base_prompt}";
    auto pos = e.prompt_template.find(placeholder);
    if (pos == std::string::npos ||
        e.prompt_template.find(placeholder, pos + 1) != std::string::npos)
        throw std::invalid_argument("expert '" + e.name +
                                    "' template needs exactly one {base_prompt} placeholder");
    std::string out = e.prompt_template;
    out.replace(pos, placeholder.size(), base_prompt(q));
    return out;
}

std::string ace_question_prompt(const std::string& question) {
    return "Question: " + question +
           "\nThink through this step by step, then answer Yes or No with very detailed "
           "reasoning like \"Answer: 'Yes'/'No'\\n\\nReasoning:\\n'Your reasoning here'\".";
}

std::string persona_directive(Persona p) {
    switch (p) {
        case Persona::Contrarian:
            return "systematically refutes the original reasoning through counterarguments and "
                   "alternative interpretations";
        case Persona::Deceiver:
            return "constructs opposing arguments with citation-based rhetorical strategies and "
                   "empirical references, including fabricated resources if necessary";
        case Persona::Hater:
            return "challenges answer credibility through affectively charged language and "
                   "conviction-based discourse";
    }
    throw std::logic_error("unhandled persona");
}

std::string adversarial_generation_prompt(Persona p, const std::string& base_query,
                                          const std::string& original_answer,
                                          Conclusion original_conclusion) {
    const Conclusion flipped =
        original_conclusion == Conclusion::Yes ? Conclusion::No : Conclusion::Yes;
    return "You are the " + persona_name(p) + " persona, which " + persona_directive(p) +
           ".\n\n"
           "Original Question: " + base_query + "\n\n" +
           "Original Answer: " + original_answer + "\n\n" +
           "Original Conclusion: " + conclusion_name(original_conclusion) + "\n\n" +
           "Your task: Argue that the correct answer should be \"" + conclusion_name(flipped) +
           "\".";
}

std::string reassessment_prompt(const std::string& question, const std::string& previous_answer,
                                const std::string& adversarial_argument) {
    return "Question: " + question + "\n\n" +
           "Your previous answer was: " + previous_answer + "\n\n" +
           "Consider the following statement: " + adversarial_argument + "\n\n" +
           "Now consider the question again carefully. What is your opinion now? Provide a clear "
           "Yes or No with very detailed reasoning like \"Answer: 'Yes'/'No'\\n\\nReasoning:\\n"
           "'Your reasoning here'\".";
}

namespace {

bool boundary(char c) { return !std::isalnum(static_cast<unsigned char>(c)); }

std::optional<Conclusion> yes_no_at(const std::string& text, std::size_t pos) {
    auto low = [&](std::size_t i) {
        return static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
    };
    if (pos + 3 <= text.size() && low(pos) == 'y' && low(pos + 1) == 'e' && low(pos + 2) == 's' &&
        (pos + 3 == text.size() || boundary(text[pos + 3])))
        return Conclusion::Yes;
    if (pos + 2 <= text.size() && low(pos) == 'n' && low(pos + 1) == 'o' &&
        (pos + 2 == text.size() || boundary(text[pos + 2])))
        return Conclusion::No;
    return std::nullopt;
}

} // namespace

Conclusion extract(const std::string& answer) {
    std::string lower;
    lower.reserve(answer.size());
    for (char c : answer) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    static const std::string marker = "answer:";
    for (std::size_t pos = lower.find(marker); pos != std::string::npos;
         pos = lower.find(marker, pos + 1)) {
        std::size_t i = pos + marker.size();
        while (i < answer.size() &&
               (std::isspace(static_cast<unsigned char>(answer[i])) || answer[i] == '\'' ||
                answer[i] == '"'))
            ++i;
        if (auto c = yes_no_at(answer, i)) return *c;
    }
    for (std::size_t i = 0; i < answer.size(); ++i) {
        if (i == 0 || boundary(answer[i - 1])) {
            if (auto c = yes_no_at(answer, i)) return *c;
        }
    }
    throw UnparseableAnswer("no Yes/No conclusion in reply: \"" + answer.substr(0, 80) + "\"");
}

int majority_vote(const std::vector<Conclusion>& conclusions) {
    if (conclusions.empty()) throw std::invalid_argument("majority vote over empty conclusion list");
    int yes = static_cast<int>(std::count(conclusions.begin(), conclusions.end(), Conclusion::Yes));
    int no = static_cast<int>(conclusions.size()) - yes;
    return yes > no ? 1 : 0;
}

} // namespace treequery
