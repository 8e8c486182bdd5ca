#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "arc/actor.hpp"
#include "arc/backends.hpp"
#include "arc/core.hpp"
#include "arc/templates.hpp"

namespace arc {

struct CmCapabilities {
    bool summarize = true;
    bool checklist_updates = true;
    bool memory_revision = true;
    bool reflection = true;

    // named ablation variants
    static CmCapabilities full() { return {true, true, true, true}; }
    static CmCapabilities summary_only() { return {true, false, false, false}; }
    static CmCapabilities summary_checklist() { return {true, true, false, true}; }
    static CmCapabilities reflection_checklist_only() { return {true, true, false, true}; }
    static CmCapabilities none() { return {false, false, false, false}; }

    bool consistent() const { return !memory_revision || reflection; }
    bool operator==(const CmCapabilities&) const = default;
};

struct ManagementPolicy {
    enum class Kind { arc_per_turn, arc_every_k, arc_budget_triggered, react_raw, resum_static };

    Kind kind = Kind::arc_per_turn;
    int k = 0;                    // arc_every_k only
    long threshold_tokens = 0;    // arc_budget_triggered / resum_static

    static constexpr long kNoThreshold = std::numeric_limits<long>::max();

    bool is_arc() const {
        return kind == Kind::arc_per_turn || kind == Kind::arc_every_k ||
               kind == Kind::arc_budget_triggered;
    }
    bool consistent() const;
};

std::string to_string(ManagementPolicy::Kind k);
ManagementPolicy::Kind policy_kind_from_string(const std::string& s);

struct ReflectionSignal {
    bool requested_by_cm = false;
    bool heuristic_repetition = false;
    bool heuristic_stall = false;
    std::vector<std::string> reasons;

    bool triggered() const {
        return requested_by_cm || heuristic_repetition || heuristic_stall;
    }
};

struct SummarizeResult {
    InteractionMemory memory;
    Checklist checklist;
    ReflectionSignal signal;
    bool fallback = false;  // mechanical entry after CM parse failure
};

struct ReflectResult {
    InteractionMemory memory;
    Checklist checklist;
    bool degraded = false;  // CM reply unusable; inputs returned unchanged
};

// Episode-start checklist from one cm_summarize-tagged call. Falls back
// to a single "Answer the query" item after 2 failed parses. revision = 1.
Checklist initialize_checklist(const Query& q, Backend& backend,
                               const Templates& templates, int retries = 2);

// Strictly incremental memory update: appends exactly one entry for
// i_prev, leaving prior entries untouched. Checklist changes only when
// caps.checklist_updates and the CM proposal is a valid monotone
// transition. The signal carries the CM's self-assessment; heuristic
// fields are filled by the caller.
SummarizeResult summarize_step(const Query& q, const ContextState& prev,
                               const Interaction& i_prev, const CmCapabilities& caps,
                               Backend& backend, const Templates& templates,
                               int retries = 2);

struct HeuristicSignals {
    bool repetition = false;
    bool stall = false;
};

// repetition: last `window` actions identical (tool, normalized argument).
// stall: no checklist status change within the window and no answer action.
HeuristicSignals heuristic_signals(std::span<const Interaction> history, int window = 3,
                                   int turns_since_checklist_change =
                                       std::numeric_limits<int>::max());

// Joint reorganization of memory and checklist. With
// caps.memory_revision=false the memory is returned byte-identical
// regardless of the CM reply. Proposed memory must cover turns
// 1..i_prev.turn exactly; otherwise the result is degraded and the inputs
// come back unchanged.
ReflectResult reflect(const Query& q, const Checklist& l_prev,
                      const InteractionMemory& m_cur, const Interaction& i_prev,
                      const CmCapabilities& caps, Backend& backend,
                      const Templates& templates, int retries = 2);

bool should_manage(const ManagementPolicy& policy, int turn, long context_tokens);

struct ResumResult {
    InteractionMemory memory;
    bool fallback = false;
};

// ReSum baseline compression: previous summary plus the raw history
// collapse into a single entry spanning [1, last raw turn].
ResumResult resum_compress(const Query& q, const InteractionMemory& prev,
                           std::span<const Interaction> raw_history, Backend& backend,
                           const Templates& templates, int retries = 2);

// ReAct baseline context: every interaction verbatim, in order.
std::string react_context(std::span<const Interaction> raw_history);

// Mechanical digest used by fallback paths: "turn N: <tool> -> <first 40
// tokens of observation>".
std::string mechanical_digest(const Interaction& interaction);

}  // namespace arc
