#pragma once

// Shared fixtures for unit and acceptance tests: script builders, a toy
// corpus, and generators for randomized scripted episodes.

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "arc/context_manager.hpp"
#include "arc/environment.hpp"
#include "arc/runtime.hpp"

namespace arctest {

using arc::json;

inline std::string action_line(const std::string& tool, const std::string& argument) {
    json j{{"tool", tool}, {"argument", argument}};
    return "ACTION: " + j.dump();
}

inline std::string actor_reply(const std::string& reasoning, const std::string& tool,
                               const std::string& argument) {
    return reasoning + "\n" + action_line(tool, argument);
}

inline std::string summarize_reply(const std::string& entry, bool reflection_needed = false,
                                   std::vector<std::pair<int, std::string>> updates = {}) {
    json j{{"new_entry", entry},
           {"reflection_needed", reflection_needed},
           {"reasons", json::array()}};
    if (reflection_needed) j["reasons"].push_back("cm requested reflection");
    if (!updates.empty()) {
        auto& arr = j["checklist_status_updates"] = json::array();
        for (const auto& [index, status] : updates)
            arr.push_back({{"index", index}, {"status", status}});
    }
    return j.dump();
}

inline std::string init_checklist_reply(int items = 4) {
    std::string out;
    for (int i = 1; i <= items; ++i)
        out += std::to_string(i) + ". Objective number " + std::to_string(i) + "\n";
    return out;
}

inline std::string reflect_reply(const std::vector<std::tuple<int, int, std::string>>& entries,
                                 const std::vector<std::pair<std::string, std::string>>& items) {
    json j;
    auto& mem = j["memory_entries"] = json::array();
    for (const auto& [a, b, text] : entries)
        mem.push_back({{"turn_start", a}, {"turn_end", b}, {"text", text}});
    auto& cl = j["checklist"] = json::array();
    for (const auto& [description, status] : items)
        cl.push_back({{"description", description}, {"status", status}});
    return j.dump();
}

inline std::shared_ptr<const arc::SearchIndex> toy_index() {
    static std::shared_ptr<const arc::SearchIndex> index =
        std::make_shared<arc::SearchIndex>(arc::SearchIndex::build({
            {"d1", "alpha ridge", "the alpha ridge trail climbs past the old fire tower"},
            {"d2", "beta lake", "beta lake holds trout and the water stays cold all summer"},
            {"d3", "gamma mine", "the gamma mine closed in 1921 after the alpha vein ran dry"},
        }));
    return index;
}

inline std::shared_ptr<arc::ToolEnvironment> toy_environment() {
    return std::make_shared<arc::OfflineEnvironment>(toy_index());
}

// Environment wrapper that counts tool calls.
class CountingEnvironment : public arc::ToolEnvironment {
public:
    explicit CountingEnvironment(std::shared_ptr<arc::ToolEnvironment> inner)
        : inner_(std::move(inner)) {}

    std::vector<arc::SearchResult> search(const std::string& query, int top_k) override {
        ++calls;
        return inner_->search(query, top_k);
    }
    arc::Observation visit(const std::string& doc_id, int cap) override {
        ++calls;
        return inner_->visit(doc_id, cap);
    }

    int calls = 0;

private:
    std::shared_ptr<arc::ToolEnvironment> inner_;
};

// A scripted episode of n turns: n-1 tool actions with distinct arguments
// (no heuristic repetition), then an answer. CM scripts per-turn
// summaries with reflection_needed=false.
struct ScriptedEpisode {
    std::shared_ptr<arc::ScriptedBackend> actor;
    std::shared_ptr<arc::ScriptedBackend> cm;
    std::vector<std::string> cm_summaries;  // reply text per summarize call, in order
};

inline ScriptedEpisode make_scripted_episode(int turns, std::mt19937& rng) {
    ScriptedEpisode ep;
    ep.actor = std::make_shared<arc::ScriptedBackend>();
    ep.cm = std::make_shared<arc::ScriptedBackend>();
    ep.cm->push(arc::RoleTag::cm_summarize, init_checklist_reply());

    std::uniform_int_distribution<int> coin(0, 1);
    for (int t = 1; t < turns; ++t) {
        std::string arg = "query token " + std::to_string(t) + " " +
                          std::to_string(rng());
        std::string tool = coin(rng) ? "search" : "visit";
        ep.actor->push(arc::RoleTag::actor,
                       actor_reply("thinking about step " + std::to_string(t), tool,
                                   tool == "visit" ? "d" + std::to_string(1 + t % 3) : arg));
    }
    ep.actor->push(arc::RoleTag::actor, actor_reply("done", "answer", "final answer"));

    for (int t = 1; t < turns; ++t) {
        std::string reply =
            summarize_reply("summary of turn " + std::to_string(t) + " value " +
                            std::to_string(rng()));
        ep.cm_summaries.push_back(reply);
        ep.cm->push(arc::RoleTag::cm_summarize, reply);
    }
    return ep;
}

inline arc::EpisodeConfig arc_config(const ScriptedEpisode& ep,
                                     arc::ManagementPolicy policy =
                                         {arc::ManagementPolicy::Kind::arc_per_turn, 0, 0},
                                     arc::CmCapabilities caps = arc::CmCapabilities::full()) {
    arc::EpisodeConfig cfg;
    cfg.policy = policy;
    cfg.caps = caps;
    cfg.actor_backend = ep.actor;
    cfg.cm_backend = ep.cm;
    cfg.environment = toy_environment();
    // generated scripts carry no reflect replies; keep the heuristics quiet
    cfg.heuristic_window = 64;
    return cfg;
}

inline arc::Query test_query(const std::string& id = "q1") {
    return {id, "what lies beyond the alpha ridge trail", std::string("the fire tower")};
}

}  // namespace arctest
