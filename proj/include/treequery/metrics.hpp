#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "treequery/backend.hpp"
#include "treequery/graph.hpp"

namespace treequery {

struct RankedPrediction {
    std::string x1;
    std::string x2;
    Relation predicted = Relation::Unknown;
    double confidence = 0.0;
    // 1 iff predicted matches the true pair relation.
    int correct = 0;
};

// Canonical ranking: confidence descending, exact ties by pair order. Every
// consumer of ndcg_at_k sorts through here so tie handling is uniform.
void rank_predictions(std::vector<RankedPrediction>& predictions);

// Graded-relevance ranking quality with binary relevance. The list must
// already be in canonical rank order; a list with no correct item scores 0.
double ndcg_at_k(const std::vector<RankedPrediction>& ranked, std::size_t k);

// Single-prompt baseline. Asks one four-way question per pair and maps the
// reply onto a relation; anything ambiguous becomes Unknown. Backends with a
// text channel answer the prompt; the simulated oracle answers in closed
// form.
std::string direct_prompt(const std::string& x1, const std::string& x2,
                          const std::vector<std::string>& variables);
Relation map_direct_answer(const std::string& text, const std::string& x1, const std::string& x2);
Relation direct_llm_baseline(const std::string& x1, const std::string& x2,
                             const std::vector<std::string>& variables, ExpertBackend& backend);

} // namespace treequery
