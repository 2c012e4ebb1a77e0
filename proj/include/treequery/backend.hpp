#pragma once

#include <optional>
#include <string>
#include <vector>

#include "treequery/panel.hpp"

namespace treequery {

/// How much of a panel invocation gets logged. None keeps aggregate counts
/// only and allows backends to answer whole panels in closed form; Stats
/// keeps per-seat conclusions; Full also keeps prompts and raw replies.
enum class LogDetail { None, Stats, Full };

/// Carried on adversarial re-queries: the persona whose argument is being
/// replayed, the argument text, and the answer it attacks.
struct AdversarialContext {
    Persona persona = Persona::Contrarian;
    std::string argument;
    std::string original_answer;
};

class ExpertBackend {
public:
    virtual ~ExpertBackend() = default;

    /// One seat's judgment for one run; adv is set on adversarial re-queries.
    virtual ExpertJudgment query_expert(const QuerySpec& q, const ExpertProfile& e, int seat,
                                        int run, const AdversarialContext* adv) = 0;

    /// Persona argument for the conclusion opposite to the original answer.
    virtual std::string adv_gen(Persona persona, const std::string& base_query,
                                const std::string& original_answer) = 0;

    /// Whole-panel fast path: Yes count over the given seats for one run,
    /// or nullopt when the backend has no closed form and the caller must
    /// query seat by seat.
    virtual std::optional<int> panel_yes_count(const QuerySpec& /*q*/,
                                               const std::vector<ExpertProfile>& /*seats*/,
                                               int /*run*/, const std::optional<Persona>& /*persona*/) {
        return std::nullopt;
    }

    /// Free-form text channel for callers that need more than Yes/No (the
    /// single-prompt baseline); nullopt when the backend has none.
    virtual std::optional<std::string> raw_chat(const std::string& /*prompt*/) {
        return std::nullopt;
    }
};

} // namespace treequery
