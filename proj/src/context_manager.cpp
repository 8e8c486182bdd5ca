#include "arc/context_manager.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "arc/budget.hpp"
#include "arc/errors.hpp"

namespace arc {

bool ManagementPolicy::consistent() const {
    switch (kind) {
        case Kind::arc_every_k: return k >= 1;
        case Kind::arc_budget_triggered:
        case Kind::resum_static: return threshold_tokens > 0;
        default: return true;
    }
}

std::string to_string(ManagementPolicy::Kind k) {
    switch (k) {
        case ManagementPolicy::Kind::arc_per_turn: return "arc_per_turn";
        case ManagementPolicy::Kind::arc_every_k: return "arc_every_k";
        case ManagementPolicy::Kind::arc_budget_triggered: return "arc_budget_triggered";
        case ManagementPolicy::Kind::react_raw: return "react_raw";
        case ManagementPolicy::Kind::resum_static: return "resum_static";
    }
    return "arc_per_turn";
}

ManagementPolicy::Kind policy_kind_from_string(const std::string& s) {
    if (s == "arc_per_turn") return ManagementPolicy::Kind::arc_per_turn;
    if (s == "arc_every_k") return ManagementPolicy::Kind::arc_every_k;
    if (s == "arc_budget_triggered") return ManagementPolicy::Kind::arc_budget_triggered;
    if (s == "react_raw") return ManagementPolicy::Kind::react_raw;
    if (s == "resum_static") return ManagementPolicy::Kind::resum_static;
    throw Error("unknown policy kind: " + s);
}

std::string mechanical_digest(const Interaction& interaction) {
    return "turn " + std::to_string(interaction.turn) + ": " +
           to_string(interaction.action.tool) + " -> " +
           truncate_to_tokens(interaction.observation.content, 40);
}

namespace {

// cm call helper: returns the raw reply or nullopt-ish failure via bool
bool cm_call(Backend& backend, RoleTag tag, const std::string& system,
             const PromptDocument& prompt, std::string& reply) {
    try {
        reply = backend.chat(make_chat_request(tag, system, prompt)).text;
        return true;
    } catch (const ScriptExhausted&) {
        return false;
    } catch (const MalformedResponse&) {
        return false;
    }
}

PromptDocument cm_prompt(const Query& q, const std::string& body_label,
                         const std::string& body, const std::string& instructions) {
    PromptDocument doc;
    doc.sections.emplace_back(kSectionQuery, q.text);
    if (!body.empty()) doc.sections.emplace_back(body_label, body);
    doc.sections.emplace_back(kSectionInstructions, instructions);
    return doc;
}

}  // namespace

Checklist initialize_checklist(const Query& q, Backend& backend,
                               const Templates& templates, int retries) {
    PromptDocument prompt = cm_prompt(q, "", "", templates.cm_init_instructions);

    for (int attempt = 0; attempt <= retries; ++attempt) {
        std::string reply;
        if (!cm_call(backend, RoleTag::cm_summarize, templates.cm_system, prompt, reply))
            continue;

        Checklist checklist;
        std::istringstream in(reply);
        std::string line;
        while (std::getline(in, line)) {
            // accept "N. description" lines, skip everything else
            size_t i = 0;
            while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
            if (i == 0 || i >= line.size() || line[i] != '.') continue;
            size_t start = line.find_first_not_of(" \t", i + 1);
            if (start == std::string::npos) continue;
            ChecklistItem item;
            item.index = static_cast<int>(checklist.items.size()) + 1;
            item.description = line.substr(start);
            item.status = ItemStatus::pending;
            checklist.items.push_back(std::move(item));
        }
        if (checklist.items.size() >= 3 && checklist.items.size() <= 8) {
            checklist.revision = 1;
            return checklist;
        }
        if (!checklist.items.empty() && attempt == retries) {
            // usable but outside the preferred size band; keep it
            checklist.revision = 1;
            return checklist;
        }
    }

    Checklist fallback;
    fallback.items.push_back({1, "Answer the query", ItemStatus::pending});
    fallback.revision = 1;
    return fallback;
}

SummarizeResult summarize_step(const Query& q, const ContextState& prev,
                               const Interaction& i_prev, const CmCapabilities& caps,
                               Backend& backend, const Templates& templates,
                               int retries) {
    if (!caps.summarize) throw ConfigError("summarize_step called with summarize disabled");

    std::string body;
    if (!prev.checklist.items.empty())
        body += "[" + std::string(kSectionChecklist) + "]\n" +
                render_checklist(prev.checklist) + "\n";
    if (!prev.memory.entries.empty()) {
        body += "[" + std::string(kSectionMemory) + "]\n";
        for (const auto& entry : prev.memory.entries)
            body += render_memory_entry(entry) + "\n";
        body += "\n";
    }
    body += "[INTERACTION]\n" + render_interaction(i_prev);
    PromptDocument prompt =
        cm_prompt(q, "CONTEXT", body, templates.cm_summarize_instructions);

    SummarizeResult result;
    result.memory = prev.memory;
    result.checklist = prev.checklist;

    for (int attempt = 0; attempt <= retries; ++attempt) {
        std::string reply;
        if (!cm_call(backend, RoleTag::cm_summarize, templates.cm_system, prompt, reply))
            continue;
        try {
            json j = json::parse(reply);
            std::string text = j.at("new_entry").get<std::string>();
            if (text.empty()) continue;

            MemoryEntry entry;
            entry.turn_start = entry.turn_end = i_prev.turn;
            entry.text = std::move(text);
            entry.revised = false;
            result.memory.entries.push_back(std::move(entry));

            if (caps.checklist_updates && j.contains("checklist_status_updates")) {
                Checklist proposed = prev.checklist;
                bool in_range = true;
                for (const auto& upd : j["checklist_status_updates"]) {
                    int index = upd.at("index").get<int>();
                    if (index < 1 || index > static_cast<int>(proposed.items.size())) {
                        in_range = false;
                        break;
                    }
                    proposed.items[index - 1].status =
                        item_status_from_string(upd.at("status").get<std::string>());
                }
                if (in_range &&
                    checklist_transition_valid(prev.checklist, proposed, false))
                    result.checklist = proposed;
            }

            result.signal.requested_by_cm = j.value("reflection_needed", false);
            if (j.contains("reasons"))
                for (const auto& r : j["reasons"])
                    result.signal.reasons.push_back(r.get<std::string>());
            return result;
        } catch (const json::exception&) {
            continue;
        } catch (const Error&) {
            continue;
        }
    }

    // parse failure: mechanical entry, prior state preserved, signal all-false
    MemoryEntry entry;
    entry.turn_start = entry.turn_end = i_prev.turn;
    entry.text = mechanical_digest(i_prev);
    entry.revised = false;
    result.memory.entries.push_back(std::move(entry));
    result.signal = {};
    result.fallback = true;
    return result;
}

namespace {

std::string normalize_argument(const std::string& arg) {
    std::string out;
    bool prev_space = false;
    for (char c : arg) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            prev_space = true;
            continue;
        }
        if (prev_space && !out.empty()) out += ' ';
        prev_space = false;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

}  // namespace

HeuristicSignals heuristic_signals(std::span<const Interaction> history, int window,
                                   int turns_since_checklist_change) {
    HeuristicSignals signals;
    if (static_cast<int>(history.size()) < window) return signals;

    signals.repetition = true;
    const auto& last = history.back();
    for (size_t i = history.size() - window; i < history.size(); ++i) {
        if (history[i].action.tool != last.action.tool ||
            normalize_argument(history[i].action.argument) !=
                normalize_argument(last.action.argument)) {
            signals.repetition = false;
            break;
        }
    }

    bool answered_in_window = false;
    for (size_t i = history.size() - window; i < history.size(); ++i)
        if (history[i].action.tool == Tool::answer) answered_in_window = true;
    signals.stall = turns_since_checklist_change >= window && !answered_in_window;
    return signals;
}

ReflectResult reflect(const Query& q, const Checklist& l_prev,
                      const InteractionMemory& m_cur, const Interaction& i_prev,
                      const CmCapabilities& caps, Backend& backend,
                      const Templates& templates, int retries) {
    if (!caps.reflection) throw ConfigError("reflect called with reflection disabled");

    std::string body;
    body += "[" + std::string(kSectionChecklist) + "]\n" + render_checklist(l_prev) + "\n";
    if (!m_cur.entries.empty()) {
        body += "[" + std::string(kSectionMemory) + "]\n";
        for (const auto& entry : m_cur.entries) body += render_memory_entry(entry) + "\n";
        body += "\n";
    }
    body += "[" + std::string(kSectionLastInteraction) + "]\n" + render_interaction(i_prev);
    PromptDocument prompt = cm_prompt(q, "CONTEXT", body, templates.cm_reflect_instructions);

    int last_turn = m_cur.entries.empty() ? 0 : m_cur.entries.back().turn_end;

    for (int attempt = 0; attempt <= retries; ++attempt) {
        std::string reply;
        if (!cm_call(backend, RoleTag::cm_reflect, templates.cm_system, prompt, reply))
            continue;
        try {
            json j = json::parse(reply);

            Checklist checklist;
            for (const auto& item : j.at("checklist")) {
                ChecklistItem it;
                it.index = static_cast<int>(checklist.items.size()) + 1;
                it.description = item.at("description").get<std::string>();
                it.status = item_status_from_string(item.at("status").get<std::string>());
                checklist.items.push_back(std::move(it));
            }
            checklist.revision = l_prev.revision + 1;
            if (!checklist.well_formed() || checklist.items.empty()) continue;

            InteractionMemory memory = m_cur;
            if (caps.memory_revision) {
                InteractionMemory proposed;
                for (const auto& entry : j.at("memory_entries")) {
                    MemoryEntry e;
                    e.turn_start = entry.at("turn_start").get<int>();
                    e.turn_end = entry.at("turn_end").get<int>();
                    e.text = entry.at("text").get<std::string>();
                    // unchanged single-turn entries keep their flag, anything
                    // else is marked revised
                    e.revised = true;
                    for (const auto& old : m_cur.entries) {
                        if (old.turn_start == e.turn_start && old.turn_end == e.turn_end &&
                            old.text == e.text) {
                            e.revised = old.revised || e.turn_start < e.turn_end;
                            break;
                        }
                    }
                    if (e.turn_start < e.turn_end) e.revised = true;
                    proposed.entries.push_back(std::move(e));
                }
                if (!memory_covers_exactly(proposed, last_turn)) continue;
                memory = std::move(proposed);
            }
            return {std::move(memory), std::move(checklist), false};
        } catch (const json::exception&) {
            continue;
        } catch (const Error&) {
            continue;
        }
    }

    return {m_cur, l_prev, true};
}

bool should_manage(const ManagementPolicy& policy, int turn, long context_tokens) {
    switch (policy.kind) {
        case ManagementPolicy::Kind::arc_per_turn:
            return true;
        case ManagementPolicy::Kind::arc_every_k:
            return turn % policy.k == 0;
        case ManagementPolicy::Kind::arc_budget_triggered:
            return policy.threshold_tokens != ManagementPolicy::kNoThreshold &&
                   context_tokens > policy.threshold_tokens;
        case ManagementPolicy::Kind::react_raw:
        case ManagementPolicy::Kind::resum_static:
            return false;
    }
    return false;
}

ResumResult resum_compress(const Query& q, const InteractionMemory& prev,
                           std::span<const Interaction> raw_history, Backend& backend,
                           const Templates& templates, int retries) {
    if (raw_history.empty()) throw ConfigError("resum_compress with empty raw history");
    int last_turn = raw_history.back().turn;

    std::string body;
    for (const auto& entry : prev.entries) body += render_memory_entry(entry) + "\n";
    for (const auto& interaction : raw_history) body += render_interaction(interaction);
    PromptDocument prompt = cm_prompt(q, "HISTORY", body, templates.resum_instructions);

    for (int attempt = 0; attempt <= retries; ++attempt) {
        std::string reply;
        if (!cm_call(backend, RoleTag::cm_summarize, templates.cm_system, prompt, reply))
            continue;
        if (reply.empty()) continue;
        InteractionMemory memory;
        memory.entries.push_back({1, last_turn, reply, true});
        return {std::move(memory), false};
    }

    // fallback: concatenated mechanical digests
    std::string digest;
    for (const auto& entry : prev.entries) digest += entry.text + "\n";
    for (const auto& interaction : raw_history) digest += mechanical_digest(interaction) + "\n";
    InteractionMemory memory;
    memory.entries.push_back({1, last_turn, digest, true});
    return {std::move(memory), true};
}

std::string react_context(std::span<const Interaction> raw_history) {
    std::string out;
    for (const auto& interaction : raw_history) out += render_interaction(interaction);
    return out;
}

}  // namespace arc
