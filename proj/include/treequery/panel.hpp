#pragma once

#include <string>
#include <vector>

#include "treequery/errors.hpp"

namespace treequery {

enum class QueryType { BackdoorPath, Independence, LatentConfounder, CausalDirection };
enum class Polarity { Forward, Backward };
enum class Branch { Root, AfterBlock, NoBackdoor };
enum class Conclusion { No = 0, Yes = 1 };
enum class Persona { Contrarian = 0, Deceiver = 1, Hater = 2 };

std::string query_type_name(QueryType q);
std::string branch_name(Branch b);
std::string conclusion_name(Conclusion c);
std::string persona_name(Persona p);

struct ExpertProfile {
    int id = 0;
    std::string name;
    std::string specialty;
    std::string prompt_template; // contains exactly one {base_prompt} placeholder
};

/// The seven built-in experts, ids 0..6 in a fixed order.
const std::vector<ExpertProfile>& default_pool();

/// One primitive query against a variable pair. The branch tags which
/// conceptual setting the panel should assume; polarity only matters for
/// causal_direction.
struct QuerySpec {
    QueryType query_type = QueryType::BackdoorPath;
    Polarity polarity = Polarity::Forward;
    Branch branch = Branch::Root;
    std::string x1;
    std::string x2;
    std::vector<std::string> variables;
};

/// Throws when x1/x2 coincide, are missing from the variable list, or the
/// branch does not fit the query type (root exactly for backdoor_path).
void validate_query(const QuerySpec& q);

struct ExpertJudgment {
    int expert_id = 0;
    Conclusion conclusion = Conclusion::No;
    std::string raw_text; // empty for the simulated backend
};

/// Specialty filter for the query type, in id order; falls back to the whole
/// pool when no specialty matches.
std::vector<ExpertProfile> routing_rules(QueryType query_type,
                                         const std::vector<ExpertProfile>& pool);

/// First min(m, |base|) experts of base in id order, padded by wrapping the
/// full pool from id 0 when m exceeds the base; repeats fill independent
/// panel seats.
std::vector<ExpertProfile> clinic_select(const std::vector<ExpertProfile>& base,
                                         const std::vector<ExpertProfile>& pool, int m);

std::string question_sentence(const QuerySpec& q);
std::string base_prompt(const QuerySpec& q);
std::string build_expert_prompt(const QuerySpec& q, const ExpertProfile& e);

/// Answer-format wrapper asking for "Answer: 'Yes'/'No'" plus reasoning.
std::string ace_question_prompt(const std::string& question);

std::string persona_directive(Persona p);
std::string adversarial_generation_prompt(Persona p, const std::string& base_query,
                                          const std::string& original_answer,
                                          Conclusion original_conclusion);
std::string reassessment_prompt(const std::string& question, const std::string& previous_answer,
                                const std::string& adversarial_argument);

/// First "Answer:" marker followed by Yes/No (case-insensitive, quotes
/// optional), else the first standalone Yes/No token; otherwise throws
/// UnparseableAnswer.
Conclusion extract(const std::string& answer);

/// 1 when strictly more Yes than No, else 0 (ties included).
int majority_vote(const std::vector<Conclusion>& conclusions);

} // namespace treequery
