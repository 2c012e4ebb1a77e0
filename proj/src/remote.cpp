#include "treequery/remote.hpp"

#include <cstdlib>
#include <stdexcept>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "treequery/errors.hpp"

namespace treequery {

namespace {

void split_url(const std::string& url, std::string& base, std::string& path) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) {
        throw std::invalid_argument("endpoint must include a scheme: " + url);
    }
    const auto slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) {
        base = url;
        path = "/v1/chat/completions";
    } else {
        base = url.substr(0, slash);
        path = url.substr(slash);
    }
}

} // namespace

RemoteBackend::RemoteBackend(RemoteConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.timeout_seconds < 1) throw std::invalid_argument("timeout must be positive");
    if (cfg_.retries < 0) throw std::invalid_argument("retries must be non-negative");
    split_url(cfg_.endpoint, base_, path_);
    const char* key = std::getenv("TREEQUERY_API_KEY");
    if (key == nullptr || *key == '\0') {
        throw std::runtime_error("TREEQUERY_API_KEY is not set");
    }
    token_ = key;
}

std::string RemoteBackend::post_chat(const std::string& prompt) const {
    nlohmann::json request{
        {"model", cfg_.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
    };

    httplib::Client client(base_);
    client.set_connection_timeout(cfg_.timeout_seconds, 0);
    client.set_read_timeout(cfg_.timeout_seconds, 0);
    client.set_write_timeout(cfg_.timeout_seconds, 0);
    client.set_bearer_token_auth(token_);

    auto res = client.Post(path_, request.dump(), "application/json");
    if (!res) {
        throw TransportError("request to " + base_ + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw TransportError("endpoint returned status " + std::to_string(res->status));
    }
    try {
        auto body = nlohmann::json::parse(res->body);
        return body.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw TransportError(std::string("malformed response body: ") + e.what());
    }
}

ExpertJudgment RemoteBackend::query_expert(const QuerySpec& q, const ExpertProfile& e, int, int,
                                           const AdversarialContext* adv) {
    const std::string inner = build_expert_prompt(q, e);
    const std::string prompt = adv
        ? reassessment_prompt(inner, adv->original_answer, adv->argument)
        : ace_question_prompt(inner);
    for (int attempt = 0;; ++attempt) {
        try {
            const std::string text = post_chat(prompt);
            return ExpertJudgment{e.id, extract(text), text};
        } catch (const UnparseableAnswer&) {
            if (attempt >= cfg_.retries) throw;
        } catch (const TransportError&) {
            if (attempt >= cfg_.retries) throw;
        }
    }
}

std::optional<std::string> RemoteBackend::raw_chat(const std::string& prompt) {
    for (int attempt = 0;; ++attempt) {
        try {
            return post_chat(prompt);
        } catch (const TransportError&) {
            if (attempt >= cfg_.retries) throw;
        }
    }
}

std::string RemoteBackend::adv_gen(Persona persona, const std::string& base_query,
                                   const std::string& original_answer) {
    // The representative answer always carries a parseable conclusion; the
    // template needs it to name the side being argued against.
    const Conclusion original = extract(original_answer);
    const std::string prompt =
        adversarial_generation_prompt(persona, base_query, original_answer, original);
    for (int attempt = 0;; ++attempt) {
        try {
            return post_chat(prompt);
        } catch (const TransportError&) {
            if (attempt >= cfg_.retries) throw;
        }
    }
}

} // namespace treequery
