#include "arc/templates.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "arc/errors.hpp"

namespace arc {

namespace {

const char* kActorSystem =
    "You are a research agent that answers questions by searching an external "
    "corpus. You work step by step: think, then act.";

const char* kActorInstructions =
    "Decide the single best next step toward answering the query.\n"
    "Available tools:\n"
    "  search - issue a search query over the corpus; argument is the query text\n"
    "  visit  - read a document; argument is its doc_id\n"
    "  answer - give the final answer; argument is the answer text\n"
    "Write your reasoning, then end your reply with exactly one line of the form\n"
    "ACTION: {\"tool\": \"<search|visit|answer>\", \"argument\": \"...\"}";

const char* kForcedAnswerInstructions =
    "You have run out of interaction budget. Consolidate everything you know "
    "and give your best final answer now.\n"
    "Reply with reasoning (optional) followed by exactly one line of the form\n"
    "ACTION: {\"tool\": \"answer\", \"argument\": \"<your answer>\"}";

const char* kCmSystem =
    "You are a context manager. You maintain the agent's checklist and "
    "interaction memory. You never choose actions.";

const char* kCmInitInstructions =
    "Read the query and produce a short checklist of 3-8 concrete objectives "
    "that would lead to an answer. Reply with a numbered list only, one "
    "objective per line, like:\n1. First objective\n2. Second objective";

const char* kCmSummarizeInstructions =
    "Summarize the interaction above into one compact memory entry that "
    "preserves task-relevant evidence. Do not speculate. Then assess whether "
    "progress has degraded (stalled progress, contradictions, repeated "
    "unproductive actions).\n"
    "Reply with a single JSON object:\n"
    "{\"new_entry\": \"<summary of this interaction>\",\n"
    " \"checklist_status_updates\": [{\"index\": <n>, \"status\": "
    "\"<pending|in_progress|done>\"}],\n"
    " \"reflection_needed\": <true|false>,\n"
    " \"reasons\": [\"...\"]}";

const char* kCmReflectInstructions =
    "Execution has degraded. Reorganize the interaction memory and rewrite "
    "the checklist so they reflect the current best understanding of the "
    "task. You may merge, rewrite, or drop memory entries, but the entries "
    "you return must cover every past turn exactly once, in order.\n"
    "Reply with a single JSON object:\n"
    "{\"memory_entries\": [{\"turn_start\": <a>, \"turn_end\": <b>, \"text\": "
    "\"...\"}],\n"
    " \"checklist\": [{\"description\": \"...\", \"status\": "
    "\"<pending|in_progress|done|abandoned>\"}]}";

const char* kResumInstructions =
    "Compress the entire interaction history above into one dense summary "
    "that preserves all task-relevant findings. Reply with the summary text "
    "only.";

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw IoError("cannot open template file: " + p.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void maybe_load(std::string& field, const std::filesystem::path& dir, const char* name) {
    auto p = dir / name;
    if (std::filesystem::exists(p)) field = read_file(p);
}

}  // namespace

Templates Templates::defaults() {
    Templates t;
    t.actor_system = kActorSystem;
    t.actor_instructions = kActorInstructions;
    t.forced_answer_instructions = kForcedAnswerInstructions;
    t.cm_system = kCmSystem;
    t.cm_init_instructions = kCmInitInstructions;
    t.cm_summarize_instructions = kCmSummarizeInstructions;
    t.cm_reflect_instructions = kCmReflectInstructions;
    t.resum_instructions = kResumInstructions;
    return t;
}

Templates Templates::load_dir(const std::string& dir) {
    Templates t = defaults();
    std::filesystem::path d(dir);
    maybe_load(t.actor_system, d, "actor_system.txt");
    maybe_load(t.actor_instructions, d, "actor_instructions.txt");
    maybe_load(t.forced_answer_instructions, d, "forced_answer_instructions.txt");
    maybe_load(t.cm_system, d, "cm_system.txt");
    maybe_load(t.cm_init_instructions, d, "cm_init_instructions.txt");
    maybe_load(t.cm_summarize_instructions, d, "cm_summarize_instructions.txt");
    maybe_load(t.cm_reflect_instructions, d, "cm_reflect_instructions.txt");
    maybe_load(t.resum_instructions, d, "resum_instructions.txt");
    return t;
}

}  // namespace arc
