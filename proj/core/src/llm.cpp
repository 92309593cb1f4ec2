#include "hypgen/llm.hpp"

#include <cstdlib>
#include <fstream>
#include <regex>
#include <thread>

#include <nlohmann/json.hpp>

#include "hypgen/util.hpp"

namespace hypgen {

namespace {

std::string substitute(const std::string& text, const Bindings& bindings) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto open = text.find('<', pos);
        if (open == std::string::npos) {
            out.append(text, pos, std::string::npos);
            break;
        }
        const auto close = text.find('>', open + 1);
        if (close == std::string::npos) {
            out.append(text, pos, std::string::npos);
            break;
        }
        const std::string name = text.substr(open + 1, close - open - 1);
        const bool placeholder_like =
            !name.empty() && name.find_first_not_of(
                                 "abcdefghijklmnopqrstuvwxyz0123456789_") == std::string::npos;
        out.append(text, pos, open - pos);
        if (placeholder_like) {
            const auto it = bindings.find(name);
            if (it == bindings.end()) throw MissingBindingError(name);
            out.append(it->second);
        } else {
            out.append(text, open, close - open + 1);
        }
        pos = close + 1;
    }
    return out;
}

}  // namespace

PromptPair render(const PromptTemplate& tmpl, const Bindings& bindings) {
    PromptPair p{substitute(tmpl.instruction, bindings), substitute(tmpl.user, bindings)};
    if (trim(p.instruction).empty() || trim(p.user).empty())
        throw LlmError("rendered prompt has an empty part");
    return p;
}

std::vector<std::string> parse_hypotheses(const std::string& raw, std::size_t expected_n) {
    // Item markers are "N." followed by whitespace; items must be numbered
    // consecutively from 1, which skips stray numbers in preamble text.
    static const std::regex marker(R"((^|\s)(\d{1,3})\.\s+)");
    struct Hit {
        std::size_t body_begin;
        std::size_t marker_begin;
    };
    std::vector<Hit> hits;
    long expected = 1;
    for (auto it = std::sregex_iterator(raw.begin(), raw.end(), marker);
         it != std::sregex_iterator(); ++it) {
        const long num = std::stol((*it)[2].str());
        if (num != expected) continue;
        ++expected;
        hits.push_back(Hit{static_cast<std::size_t>(it->position() + it->length()),
                           static_cast<std::size_t>(it->position() + (*it)[1].length())});
    }
    std::vector<std::string> items;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        const std::size_t end = (i + 1 < hits.size()) ? hits[i + 1].marker_begin : raw.size();
        std::string item = trim(raw.substr(hits[i].body_begin, end - hits[i].body_begin));
        if (!item.empty()) items.push_back(std::move(item));
        if (items.size() == expected_n) break;
    }
    return items;
}

// --- TranscriptBackend ---

std::string TranscriptBackend::prompt_key(const std::string& model, const PromptPair& prompt,
                                          const DecodingParams& params) {
    std::string blob = model;
    blob.push_back('\x1f');
    blob += prompt.instruction;
    blob.push_back('\x1f');
    blob += prompt.user;
    blob.push_back('\x1f');
    blob += std::to_string(params.temperature);
    return content_hash(blob);
}

std::shared_ptr<TranscriptBackend> TranscriptBackend::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw LlmError("cannot open transcript: " + file.string());
    nlohmann::json j = nlohmann::json::parse(in);
    auto backend = std::make_shared<TranscriptBackend>();
    if (j.contains("by_hash")) {
        for (const auto& [k, v] : j.at("by_hash").items())
            backend->by_hash_[k] = v.get<std::string>();
    }
    if (j.contains("turns")) {
        for (const auto& v : j.at("turns")) backend->turns_.push_back(v.get<std::string>());
    }
    return backend;
}

std::string TranscriptBackend::complete(const std::string& model, const PromptPair& prompt,
                                        const DecodingParams& params) {
    std::lock_guard lock(mutex_);
    const std::string key = prompt_key(model, prompt, params);
    if (const auto it = by_hash_.find(key); it != by_hash_.end()) return it->second;
    if (next_turn_ < turns_.size()) return turns_[next_turn_++];
    throw PermanentLlmError("transcript exhausted; no response for prompt key " + key);
}

void TranscriptBackend::add_response(const std::string& key, const std::string& response) {
    std::lock_guard lock(mutex_);
    by_hash_[key] = response;
}

void TranscriptBackend::add_turn(const std::string& response) {
    std::lock_guard lock(mutex_);
    turns_.push_back(response);
}

// --- Gateway ---

Gateway::Gateway(std::shared_ptr<LlmBackend> backend, GatewayOptions options)
    : backend_(std::move(backend)), options_(std::move(options)) {
    const auto n = std::max<std::size_t>(1, std::min<std::size_t>(options_.max_concurrency, 256));
    slots_ = std::make_unique<std::counting_semaphore<256>>(static_cast<std::ptrdiff_t>(n));
    if (!options_.cache_dir.empty()) std::filesystem::create_directories(options_.cache_dir);
}

std::string Gateway::cache_path(const std::string& key) const {
    return (options_.cache_dir / (key + ".json")).string();
}

std::string Gateway::complete(const std::string& model, const PromptPair& prompt,
                              const DecodingParams& params) {
    const std::string key = TranscriptBackend::prompt_key(model, prompt, params);

    if (!options_.cache_dir.empty()) {
        std::lock_guard lock(cache_mutex_);
        std::ifstream in(cache_path(key));
        if (in) {
            nlohmann::json j = nlohmann::json::parse(in);
            // Guards against key collisions; on mismatch fall through to the backend.
            if (j.at("model") == model && j.at("instruction") == prompt.instruction &&
                j.at("user") == prompt.user) {
                ++cache_hits_;
                return j.at("response").get<std::string>();
            }
        }
    }

    slots_->acquire();
    struct Release {
        std::counting_semaphore<256>* s;
        ~Release() { s->release(); }
    } release{slots_.get()};

    std::string response;
    int attempt = 0;
    for (;;) {
        ++attempt;
        ++attempts_made_;
        try {
            response = backend_->complete(model, prompt, params);
            break;
        } catch (const TransientLlmError&) {
            if (attempt >= options_.retry.max_attempts) throw;
            std::this_thread::sleep_for(options_.retry.base_backoff * (1 << (attempt - 1)));
        }
    }

    if (!options_.cache_dir.empty()) {
        std::lock_guard lock(cache_mutex_);
        nlohmann::json j = {{"model", model},
                            {"instruction", prompt.instruction},
                            {"user", prompt.user},
                            {"temperature", params.temperature},
                            {"response", response}};
        std::ofstream out(cache_path(key));
        out << j.dump(2) << "\n";
    }
    return response;
}

}  // namespace hypgen
