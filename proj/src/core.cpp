#include "arc/core.hpp"

#include "arc/errors.hpp"

namespace arc {

std::string to_string(ItemStatus s) {
    switch (s) {
        case ItemStatus::pending: return "pending";
        case ItemStatus::in_progress: return "in_progress";
        case ItemStatus::done: return "done";
        case ItemStatus::abandoned: return "abandoned";
    }
    return "pending";
}

ItemStatus item_status_from_string(const std::string& s) {
    if (s == "pending") return ItemStatus::pending;
    if (s == "in_progress") return ItemStatus::in_progress;
    if (s == "done") return ItemStatus::done;
    if (s == "abandoned") return ItemStatus::abandoned;
    throw Error("unknown checklist status: " + s);
}

std::string to_string(Tool t) {
    switch (t) {
        case Tool::search: return "search";
        case Tool::visit: return "visit";
        case Tool::answer: return "answer";
    }
    return "search";
}

Tool tool_from_string(const std::string& s) {
    if (s == "search") return Tool::search;
    if (s == "visit") return Tool::visit;
    if (s == "answer") return Tool::answer;
    throw Error("unknown tool: " + s);
}

bool Checklist::well_formed() const {
    if (revision < 0) return false;
    for (size_t i = 0; i < items.size(); ++i) {
        if (items[i].index != static_cast<int>(i) + 1) return false;
        if (items[i].description.empty()) return false;
    }
    return true;
}

bool memory_ranges_valid(const InteractionMemory& mem) {
    int expected_start = 1;
    for (const auto& e : mem.entries) {
        if (e.text.empty()) return false;
        if (e.turn_start != expected_start) return false;
        if (e.turn_end < e.turn_start) return false;
        if (e.turn_start < e.turn_end && !e.revised) return false;
        expected_start = e.turn_end + 1;
    }
    return true;
}

bool memory_covers_exactly(const InteractionMemory& mem, int last_turn) {
    if (!memory_ranges_valid(mem)) return false;
    int covered = mem.entries.empty() ? 0 : mem.entries.back().turn_end;
    return covered == last_turn;
}

namespace {

int status_rank(ItemStatus s) {
    switch (s) {
        case ItemStatus::pending: return 0;
        case ItemStatus::in_progress: return 1;
        case ItemStatus::done: return 2;
        case ItemStatus::abandoned: return -1;
    }
    return 0;
}

}  // namespace

bool checklist_transition_valid(const Checklist& before, const Checklist& after,
                                bool via_reflection) {
    if (!before.well_formed() || !after.well_formed()) return false;
    if (via_reflection) return true;

    if (after.items.size() != before.items.size()) return false;
    if (after.revision != before.revision) return false;
    for (size_t i = 0; i < before.items.size(); ++i) {
        const auto& b = before.items[i];
        const auto& a = after.items[i];
        if (a.index != b.index || a.description != b.description) return false;
        if (a.status == b.status) continue;
        // abandoned can neither be entered nor left outside reflection
        if (a.status == ItemStatus::abandoned || b.status == ItemStatus::abandoned)
            return false;
        if (status_rank(a.status) < status_rank(b.status)) return false;
    }
    return true;
}

// ── JSON ───────────────────────────────────────────────────────────────

void to_json(json& j, const Query& q) {
    j = json{{"id", q.id}, {"text", q.text}};
    if (q.gold_answer) j["gold_answer"] = *q.gold_answer;
}

void from_json(const json& j, Query& q) {
    j.at("id").get_to(q.id);
    j.at("text").get_to(q.text);
    q.gold_answer.reset();
    if (j.contains("gold_answer")) q.gold_answer = j.at("gold_answer").get<std::string>();
}

void to_json(json& j, const ChecklistItem& it) {
    j = json{{"index", it.index},
             {"description", it.description},
             {"status", to_string(it.status)}};
}

void from_json(const json& j, ChecklistItem& it) {
    j.at("index").get_to(it.index);
    j.at("description").get_to(it.description);
    it.status = item_status_from_string(j.at("status").get<std::string>());
}

void to_json(json& j, const Checklist& c) {
    j = json{{"items", c.items}, {"revision", c.revision}};
}

void from_json(const json& j, Checklist& c) {
    j.at("items").get_to(c.items);
    j.at("revision").get_to(c.revision);
}

void to_json(json& j, const MemoryEntry& e) {
    j = json{{"turn_start", e.turn_start},
             {"turn_end", e.turn_end},
             {"text", e.text},
             {"revised", e.revised}};
}

void from_json(const json& j, MemoryEntry& e) {
    j.at("turn_start").get_to(e.turn_start);
    j.at("turn_end").get_to(e.turn_end);
    j.at("text").get_to(e.text);
    j.at("revised").get_to(e.revised);
}

void to_json(json& j, const InteractionMemory& m) {
    j = json{{"entries", m.entries}};
}

void from_json(const json& j, InteractionMemory& m) {
    j.at("entries").get_to(m.entries);
}

void to_json(json& j, const Action& a) {
    j = json{{"tool", to_string(a.tool)}, {"argument", a.argument}};
}

void from_json(const json& j, Action& a) {
    a.tool = tool_from_string(j.at("tool").get<std::string>());
    j.at("argument").get_to(a.argument);
}

void to_json(json& j, const Observation& o) {
    j = json{{"content", o.content},
             {"source", o.source},
             {"truncated", o.truncated},
             {"token_count", o.token_count}};
}

void from_json(const json& j, Observation& o) {
    j.at("content").get_to(o.content);
    j.at("source").get_to(o.source);
    j.at("truncated").get_to(o.truncated);
    j.at("token_count").get_to(o.token_count);
}

void to_json(json& j, const Interaction& i) {
    j = json{{"turn", i.turn},
             {"reasoning", i.reasoning},
             {"action", i.action},
             {"observation", i.observation}};
}

void from_json(const json& j, Interaction& i) {
    j.at("turn").get_to(i.turn);
    j.at("reasoning").get_to(i.reasoning);
    j.at("action").get_to(i.action);
    j.at("observation").get_to(i.observation);
}

void to_json(json& j, const ContextState& s) {
    j = json{{"checklist", s.checklist}, {"memory", s.memory}};
    if (s.last_interaction) j["last_interaction"] = *s.last_interaction;
}

void from_json(const json& j, ContextState& s) {
    j.at("checklist").get_to(s.checklist);
    j.at("memory").get_to(s.memory);
    s.last_interaction.reset();
    if (j.contains("last_interaction"))
        s.last_interaction = j.at("last_interaction").get<Interaction>();
}

}  // namespace arc
