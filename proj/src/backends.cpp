#include "arc/backends.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"

#include "arc/budget.hpp"
#include "arc/errors.hpp"

namespace arc {

std::string to_string(RoleTag t) {
    switch (t) {
        case RoleTag::actor: return "actor";
        case RoleTag::cm_summarize: return "cm_summarize";
        case RoleTag::cm_reflect: return "cm_reflect";
        case RoleTag::judge: return "judge";
    }
    return "actor";
}

RoleTag role_tag_from_string(const std::string& s) {
    if (s == "actor") return RoleTag::actor;
    if (s == "cm_summarize") return RoleTag::cm_summarize;
    if (s == "cm_reflect") return RoleTag::cm_reflect;
    if (s == "judge") return RoleTag::judge;
    throw Error("unknown role tag: " + s);
}

// ── ScriptedBackend ────────────────────────────────────────────────────

ScriptedBackend ScriptedBackend::from_jsonl_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open script file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_jsonl(buf.str());
}

ScriptedBackend ScriptedBackend::from_jsonl(const std::string& text) {
    ScriptedBackend backend;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw FormatError(lineno, std::string("bad script line: ") + e.what());
        }
        backend.push(role_tag_from_string(j.at("role_tag").get<std::string>()),
                     j.at("reply").get<std::string>());
    }
    return backend;
}

void ScriptedBackend::push(RoleTag tag, std::string reply) {
    std::lock_guard lock(mutex_);
    queues_[tag].push_back(std::move(reply));
}

ChatResponse ScriptedBackend::chat(const ChatRequest& request) {
    std::lock_guard lock(mutex_);
    auto& queue = queues_[request.role_tag];
    if (queue.empty())
        throw ScriptExhausted("script exhausted for role tag " +
                              to_string(request.role_tag));
    ChatResponse resp;
    resp.text = std::move(queue.front());
    queue.pop_front();
    for (const auto& m : request.messages) resp.input_tokens += count_tokens(m.text);
    resp.output_tokens = count_tokens(resp.text);
    return resp;
}

// ── HttpBackend ────────────────────────────────────────────────────────

HttpBackend::HttpBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {
    // split endpoint into authority and path prefix
    auto pos = cfg_.endpoint.find("://");
    size_t path_start = cfg_.endpoint.find('/', pos == std::string::npos ? 0 : pos + 3);
    if (path_start == std::string::npos) {
        host_ = cfg_.endpoint;
        path_ = "/chat/completions";
    } else {
        host_ = cfg_.endpoint.substr(0, path_start);
        std::string prefix = cfg_.endpoint.substr(path_start);
        while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
        path_ = prefix + "/chat/completions";
    }
}

ChatResponse HttpBackend::chat(const ChatRequest& request) {
    json body;
    body["model"] = cfg_.model;
    body["max_tokens"] = request.max_output_tokens;
    body["temperature"] = request.temperature;
    auto& messages = body["messages"] = json::array();
    for (const auto& m : request.messages)
        messages.push_back({{"role", m.speaker}, {"content", m.text}});

    httplib::Headers headers;
    if (const char* key = std::getenv(cfg_.api_key_env.c_str()))
        headers.emplace("Authorization", std::string("Bearer ") + key);

    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        if (attempt > 0) {
            int delay = cfg_.retry_base_ms << (attempt - 1);
            std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }
        httplib::Client client(host_);
        client.set_read_timeout(cfg_.timeout_sec, 0);
        client.set_connection_timeout(10, 0);
        auto res = client.Post(path_, headers, body.dump(), "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_error = "server error " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw TransportError("chat request failed with status " +
                                 std::to_string(res->status) + ": " + res->body);
        try {
            json j = json::parse(res->body);
            ChatResponse resp;
            resp.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
            if (j.contains("usage")) {
                resp.input_tokens = j["usage"].value("prompt_tokens", 0);
                resp.output_tokens = j["usage"].value("completion_tokens", 0);
            }
            return resp;
        } catch (const json::exception& e) {
            throw MalformedResponse(std::string("malformed chat response: ") + e.what());
        }
    }
    throw TransportError("chat request failed after retries: " + last_error);
}

}  // namespace arc
