#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "hypgen/llm.hpp"

namespace hypgen {

HttpChatBackend::HttpChatBackend(std::string base_url, std::string api_key, int timeout_seconds)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)),
      timeout_seconds_(timeout_seconds) {}

std::shared_ptr<HttpChatBackend> HttpChatBackend::from_env() {
    const char* base = std::getenv("HYPGEN_API_BASE");
    if (!base) base = std::getenv("OPENAI_BASE_URL");
    const char* key = std::getenv("HYPGEN_API_KEY");
    if (!key) key = std::getenv("OPENAI_API_KEY");
    if (!base) base = "https://api.openai.com";
    if (!key) throw PermanentLlmError("no API key in HYPGEN_API_KEY or OPENAI_API_KEY");
    return std::make_shared<HttpChatBackend>(base, key);
}

std::string HttpChatBackend::complete(const std::string& model, const PromptPair& prompt,
                                      const DecodingParams& params) {
    httplib::Client client(base_url_);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);
    if (!api_key_.empty()) client.set_default_headers({{"Authorization", "Bearer " + api_key_}});

    const nlohmann::json body = {
        {"model", model},
        {"temperature", params.temperature},
        {"messages",
         {{{"role", "system"}, {"content", prompt.instruction}},
          {{"role", "user"}, {"content", prompt.user}}}}};

    auto res = client.Post("/v1/chat/completions", body.dump(), "application/json");
    if (!res) throw TransientLlmError("chat request failed: " + httplib::to_string(res.error()));
    if (res->status == 401 || res->status == 403)
        throw PermanentLlmError("authentication failed (HTTP " + std::to_string(res->status) + ")");
    if (res->status == 429 || res->status >= 500)
        throw TransientLlmError("provider unavailable (HTTP " + std::to_string(res->status) + ")");
    if (res->status != 200)
        throw PermanentLlmError("unexpected HTTP " + std::to_string(res->status) + ": " + res->body);

    try {
        const nlohmann::json j = nlohmann::json::parse(res->body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw PermanentLlmError(std::string("malformed chat response: ") + e.what());
    }
}

}  // namespace hypgen
