#pragma once

#include <string>

#include "treequery/backend.hpp"

namespace treequery {

struct RemoteConfig {
    // Full URL of a chat-completions-compatible endpoint.
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string model = "gpt-4o-mini";
    int timeout_seconds = 60;
    // Extra attempts after the first, shared by transport failures and
    // unparseable replies.
    int retries = 1;
};

// Panel seats served by a chat model over HTTP. The bearer token comes from
// the TREEQUERY_API_KEY environment variable and is never written anywhere.
// Each call opens its own connection, so concurrent use is safe.
class RemoteBackend : public ExpertBackend {
  public:
    explicit RemoteBackend(RemoteConfig cfg);

    ExpertJudgment query_expert(const QuerySpec& q, const ExpertProfile& e, int seat, int run,
                                const AdversarialContext* adv) override;
    std::string adv_gen(Persona persona, const std::string& base_query,
                        const std::string& original_answer) override;
    std::optional<std::string> raw_chat(const std::string& prompt) override;

    const RemoteConfig& config() const { return cfg_; }

  private:
    std::string post_chat(const std::string& prompt) const;

    RemoteConfig cfg_;
    std::string base_;
    std::string path_;
    std::string token_;
};

} // namespace treequery
