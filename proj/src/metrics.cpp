#include "treequery/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "treequery/simulated.hpp"

namespace treequery {

namespace {

std::string lowercase(const std::string& text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

} // namespace

void rank_predictions(std::vector<RankedPrediction>& predictions) {
    std::sort(predictions.begin(), predictions.end(),
              [](const RankedPrediction& a, const RankedPrediction& b) {
                  if (a.confidence != b.confidence) return a.confidence > b.confidence;
                  if (a.x1 != b.x1) return a.x1 < b.x1;
                  return a.x2 < b.x2;
              });
}

double ndcg_at_k(const std::vector<RankedPrediction>& ranked, std::size_t k) {
    if (k > ranked.size()) throw std::invalid_argument("k exceeds the ranking length");
    for (std::size_t i = 1; i < ranked.size(); ++i) {
        if (ranked[i - 1].confidence < ranked[i].confidence) {
            throw std::invalid_argument("predictions are not in rank order");
        }
    }
    std::size_t relevant = 0;
    for (const auto& p : ranked) relevant += p.correct != 0 ? 1 : 0;
    if (relevant == 0) return 0.0;

    double dcg = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        if (ranked[i].correct != 0) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    }
    double ideal = 0.0;
    for (std::size_t i = 0; i < std::min(k, relevant); ++i) {
        ideal += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    }
    return dcg / ideal;
}

std::string direct_prompt(const std::string& x1, const std::string& x2,
                          const std::vector<std::string>& variables) {
    std::string vars;
    for (const auto& v : variables) {
        if (!vars.empty()) vars += ", ";
        vars += nlohmann::json(v).dump();
    }
    return "In causal inference, consider the following variables: [" + vars + "]\n" +
           "What is the causal relationship between " + x1 + " and " + x2 + "?\n" +
           "Answer with exactly one of: \"" + x1 + " causes " + x2 + "\", \"" + x2 + " causes " +
           x1 + "\", \"no direct causal relation\", \"common cause\".";
}

Relation map_direct_answer(const std::string& text, const std::string& x1,
                           const std::string& x2) {
    const std::string low = lowercase(text);
    const std::pair<std::string, Relation> phrases[] = {
        {lowercase(x1 + " causes " + x2), Relation::Forward},
        {lowercase(x2 + " causes " + x1), Relation::Backward},
        {"no direct causal relation", Relation::Independent},
        {"common cause", Relation::Latent},
    };
    Relation found = Relation::Unknown;
    int matches = 0;
    for (const auto& [phrase, relation] : phrases) {
        if (low.find(phrase) != std::string::npos) {
            found = relation;
            ++matches;
        }
    }
    return matches == 1 ? found : Relation::Unknown;
}

Relation direct_llm_baseline(const std::string& x1, const std::string& x2,
                             const std::vector<std::string>& variables, ExpertBackend& backend) {
    if (x1 == x2) throw std::invalid_argument("pair variables must differ");
    if (auto text = backend.raw_chat(direct_prompt(x1, x2, variables))) {
        return map_direct_answer(*text, x1, x2);
    }
    if (auto* sim = dynamic_cast<SimulatedOracle*>(&backend)) {
        return sim->direct_relation(x1, x2);
    }
    throw std::invalid_argument("backend offers neither a text channel nor simulated answers");
}

} // namespace treequery
