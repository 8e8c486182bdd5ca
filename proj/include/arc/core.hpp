#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace arc {

using json = nlohmann::json;

// ── Domain types ───────────────────────────────────────────────────────

struct Query {
    std::string id;
    std::string text;
    std::optional<std::string> gold_answer;  // evaluation only, never prompted

    bool operator==(const Query&) const = default;
};

enum class ItemStatus { pending, in_progress, done, abandoned };

std::string to_string(ItemStatus s);
ItemStatus item_status_from_string(const std::string& s);

struct ChecklistItem {
    int index = 0;  // 1-based, contiguous within a checklist
    std::string description;
    ItemStatus status = ItemStatus::pending;

    bool operator==(const ChecklistItem&) const = default;
};

struct Checklist {
    std::vector<ChecklistItem> items;
    int revision = 0;  // increments only via initialization and reflection

    bool well_formed() const;
    bool operator==(const Checklist&) const = default;
};

struct MemoryEntry {
    int turn_start = 0;
    int turn_end = 0;
    std::string text;
    bool revised = false;  // true iff produced or altered by reflection

    bool operator==(const MemoryEntry&) const = default;
};

struct InteractionMemory {
    std::vector<MemoryEntry> entries;

    bool operator==(const InteractionMemory&) const = default;
};

// entries sorted by turn_start, disjoint, contiguous from turn 1
bool memory_ranges_valid(const InteractionMemory& mem);
// ranges_valid and the union is exactly turns 1..last_turn
bool memory_covers_exactly(const InteractionMemory& mem, int last_turn);

enum class Tool { search, visit, answer };

std::string to_string(Tool t);
Tool tool_from_string(const std::string& s);

struct Action {
    Tool tool = Tool::search;
    std::string argument;

    bool operator==(const Action&) const = default;
};

struct Observation {
    std::string content;
    std::string source;  // tool name that produced it
    bool truncated = false;
    int token_count = 0;

    bool operator==(const Observation&) const = default;
};

struct Interaction {
    int turn = 0;
    std::string reasoning;  // may be empty only in forced-answer turns
    Action action;
    Observation observation;

    bool operator==(const Interaction&) const = default;
};

struct ContextState {
    Checklist checklist;
    InteractionMemory memory;
    std::optional<Interaction> last_interaction;

    bool operator==(const ContextState&) const = default;
};

// ── Checklist transitions ──────────────────────────────────────────────

// Outside reflection only item statuses may change, and only forward
// along pending -> in_progress -> done. Abandoned is reachable (and
// leavable) only through reflection. Reflection may produce any
// well-formed checklist.
bool checklist_transition_valid(const Checklist& before, const Checklist& after,
                                bool via_reflection);

// ── Canonical JSON ─────────────────────────────────────────────────────

void to_json(json& j, const Query& q);
void from_json(const json& j, Query& q);
void to_json(json& j, const ChecklistItem& it);
void from_json(const json& j, ChecklistItem& it);
void to_json(json& j, const Checklist& c);
void from_json(const json& j, Checklist& c);
void to_json(json& j, const MemoryEntry& e);
void from_json(const json& j, MemoryEntry& e);
void to_json(json& j, const InteractionMemory& m);
void from_json(const json& j, InteractionMemory& m);
void to_json(json& j, const Action& a);
void from_json(const json& j, Action& a);
void to_json(json& j, const Observation& o);
void from_json(const json& j, Observation& o);
void to_json(json& j, const Interaction& i);
void from_json(const json& j, Interaction& i);
void to_json(json& j, const ContextState& s);
void from_json(const json& j, ContextState& s);

}  // namespace arc
