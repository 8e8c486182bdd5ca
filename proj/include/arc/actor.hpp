#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arc/backends.hpp"
#include "arc/budget.hpp"
#include "arc/core.hpp"
#include "arc/templates.hpp"

namespace arc {

// Section labels, in rendering order.
inline constexpr const char* kSectionQuery = "QUERY";
inline constexpr const char* kSectionChecklist = "CHECKLIST";
inline constexpr const char* kSectionMemory = "INTERACTION MEMORY";
inline constexpr const char* kSectionLastInteraction = "LAST INTERACTION";
inline constexpr const char* kSectionInstructions = "INSTRUCTIONS";

struct PromptDocument {
    std::vector<std::pair<std::string, std::string>> sections;

    std::string render() const;
};

std::string render_checklist(const Checklist& checklist);
std::string render_memory_entry(const MemoryEntry& entry);  // "[Turn a] ..." / "[Turn a-b] ..."
std::string render_interaction(const Interaction& interaction);

// Renders (reasoning, action) the way a well-behaved actor reply looks;
// parse_actor_output inverts it.
std::string render_actor_output(const std::string& reasoning, const Action& action);

// Prompt for turn t assembled from (Q, L_{t-1}, M_{t-1}, I_{t-1}).
// `unsummarized` holds raw interactions older than state.last_interaction
// that no memory entry covers yet (delayed schedules and the baselines);
// they are rendered verbatim after the memory entries. Empty sections are
// omitted. gold_answer never appears.
PromptDocument assemble_actor_prompt(const Query& q, const ContextState& state,
                                     const BudgetConfig& cfg,
                                     std::span<const Interaction> unsummarized = {},
                                     const std::string& instructions = {});

// Splits an actor reply into reasoning and the trailing "ACTION:" JSON
// line. Throws ActorParseError (no_action_line / bad_action_json /
// unknown_tool); all are retryable.
std::pair<std::string, Action> parse_actor_output(const std::string& text);

ChatRequest make_chat_request(RoleTag tag, const std::string& system,
                              const PromptDocument& prompt);

struct ForcedAnswerResult {
    Interaction interaction;
    bool failed = false;  // true when the actor never produced a parseable answer
};

// Terminal consolidation step: one actor call demanding an answer action.
// Retries parse failures up to `retries` times, then degrades to an empty
// answer with failed=true.
ForcedAnswerResult forced_answer(const Query& q, const ContextState& state,
                                 std::span<const Interaction> unsummarized,
                                 Backend& backend, const BudgetConfig& cfg,
                                 const Templates& templates, int turn,
                                 int retries = 2);

}  // namespace arc
