#pragma once

#include <deque>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "arc/core.hpp"

namespace arc {

enum class RoleTag { actor, cm_summarize, cm_reflect, judge };

std::string to_string(RoleTag t);
RoleTag role_tag_from_string(const std::string& s);

struct ChatMessage {
    std::string speaker;  // "system" or "user"
    std::string text;
};

struct ChatRequest {
    RoleTag role_tag = RoleTag::actor;
    std::vector<ChatMessage> messages;
    int max_output_tokens = 2048;
    double temperature = 0.0;
};

struct ChatResponse {
    std::string text;
    int input_tokens = 0;
    int output_tokens = 0;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual ChatResponse chat(const ChatRequest& request) = 0;
};

// Deterministic replay backend. Replies are consumed in order from one
// FIFO queue per role tag, so tests can script the actor and the CM
// independently. Throws ScriptExhausted when a queue runs dry.
class ScriptedBackend : public Backend {
public:
    ScriptedBackend() = default;
    ScriptedBackend(ScriptedBackend&& other) noexcept
        : queues_(std::move(other.queues_)) {}

    // JSONL: one {"role_tag": ..., "reply": ...} object per line.
    static ScriptedBackend from_jsonl_file(const std::string& path);
    static ScriptedBackend from_jsonl(const std::string& text);

    void push(RoleTag tag, std::string reply);
    ChatResponse chat(const ChatRequest& request) override;

private:
    std::mutex mutex_;
    std::map<RoleTag, std::deque<std::string>> queues_;
};

struct HttpBackendConfig {
    std::string endpoint;  // e.g. http://localhost:8000/v1
    std::string model;
    std::string api_key_env = "ARC_API_KEY";
    int max_retries = 3;
    int retry_base_ms = 200;
    int timeout_sec = 120;
};

// OpenAI-compatible chat-completions client with exponential backoff on
// transport failures and 5xx responses.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig cfg);
    ChatResponse chat(const ChatRequest& request) override;

private:
    HttpBackendConfig cfg_;
    std::string host_;  // scheme://authority
    std::string path_;  // path prefix + /chat/completions
};

}  // namespace arc
