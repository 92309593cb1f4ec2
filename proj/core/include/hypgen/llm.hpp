#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <atomic>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypgen/task.hpp"

namespace hypgen {

struct PromptPair {
    std::string instruction;  // system role
    std::string user;         // user role
};

struct DecodingParams {
    double temperature = 0.0;
};

class LlmError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Retryable failure (timeouts, rate limits, 5xx).
class TransientLlmError : public LlmError {
public:
    using LlmError::LlmError;
};

/// Non-retryable failure (auth, malformed request).
class PermanentLlmError : public LlmError {
public:
    using LlmError::LlmError;
};

class MissingBindingError : public LlmError {
public:
    explicit MissingBindingError(const std::string& placeholder)
        : LlmError("unbound placeholder: <" + placeholder + ">"), placeholder(placeholder) {}
    std::string placeholder;
};

using Bindings = std::map<std::string, std::string>;

/// Substitutes every <placeholder> occurrence from `bindings`. A residual
/// placeholder token after substitution is a hard error naming it.
PromptPair render(const PromptTemplate& tmpl, const Bindings& bindings);

/// Extracts "1. ... 2. ... n. ..." items, tolerating preamble text and items
/// packed on one line. Returns what parsed, possibly fewer than expected_n.
std::vector<std::string> parse_hypotheses(const std::string& raw, std::size_t expected_n);

class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual std::string complete(const std::string& model, const PromptPair& prompt,
                                 const DecodingParams& params) = 0;
};

/// Deterministic replay backend. The transcript JSON maps prompt keys to
/// responses:
///   {"by_hash": {"<hash>": "response", ...}, "turns": ["r1", "r2", ...]}
/// Lookup tries by_hash first, then consumes the next ordered turn.
class TranscriptBackend : public LlmBackend {
public:
    static std::shared_ptr<TranscriptBackend> load(const std::filesystem::path& file);

    std::string complete(const std::string& model, const PromptPair& prompt,
                         const DecodingParams& params) override;

    /// Key used by by_hash entries; exposed so transcripts can be recorded.
    static std::string prompt_key(const std::string& model, const PromptPair& prompt,
                                  const DecodingParams& params);

    void add_response(const std::string& key, const std::string& response);
    void add_turn(const std::string& response);

private:
    std::mutex mutex_;
    std::map<std::string, std::string> by_hash_;
    std::vector<std::string> turns_;
    std::size_t next_turn_ = 0;
};

/// OpenAI-style chat completions over HTTP. Endpoint and key come from the
/// environment (HYPGEN_API_BASE / HYPGEN_API_KEY, with OPENAI_* fallbacks).
class HttpChatBackend : public LlmBackend {
public:
    HttpChatBackend(std::string base_url, std::string api_key, int timeout_seconds = 120);
    static std::shared_ptr<HttpChatBackend> from_env();

    std::string complete(const std::string& model, const PromptPair& prompt,
                         const DecodingParams& params) override;

private:
    std::string base_url_;
    std::string api_key_;
    int timeout_seconds_;
};

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds base_backoff{200};
};

struct GatewayOptions {
    std::filesystem::path cache_dir;  // empty disables caching
    RetryPolicy retry;
    std::size_t max_concurrency = 4;
};

/// Wraps a backend with content-addressed response caching, bounded
/// exponential-backoff retries, and an in-flight request limit.
class Gateway {
public:
    Gateway(std::shared_ptr<LlmBackend> backend, GatewayOptions options = {});

    std::string complete(const std::string& model, const PromptPair& prompt,
                         const DecodingParams& params);

    std::size_t cache_hits() const { return cache_hits_; }
    std::size_t attempts_made() const { return attempts_made_; }

private:
    std::string cache_path(const std::string& key) const;

    std::shared_ptr<LlmBackend> backend_;
    GatewayOptions options_;
    std::mutex cache_mutex_;
    std::unique_ptr<std::counting_semaphore<256>> slots_;
    std::atomic<std::size_t> cache_hits_{0};
    std::atomic<std::size_t> attempts_made_{0};
};

}  // namespace hypgen
