#include "arc/actor.hpp"

#include <sstream>

#include "arc/errors.hpp"

namespace arc {

std::string PromptDocument::render() const {
    std::string out;
    for (const auto& [label, body] : sections) {
        out += "[" + label + "]\n";
        out += body;
        if (!body.empty() && body.back() != '\n') out += "\n";
        out += "\n";
    }
    return out;
}

std::string render_checklist(const Checklist& checklist) {
    std::string out;
    for (const auto& item : checklist.items) {
        out += std::to_string(item.index) + ". " + item.description + " [" +
               to_string(item.status) + "]\n";
    }
    return out;
}

std::string render_memory_entry(const MemoryEntry& entry) {
    std::string range = entry.turn_start == entry.turn_end
                            ? std::to_string(entry.turn_start)
                            : std::to_string(entry.turn_start) + "-" +
                                  std::to_string(entry.turn_end);
    return "[Turn " + range + "] " + entry.text;
}

std::string render_interaction(const Interaction& interaction) {
    json action_json = interaction.action;
    std::string out = "Turn " + std::to_string(interaction.turn) + "\n";
    out += "Reasoning: " + interaction.reasoning + "\n";
    out += "ACTION: " + action_json.dump() + "\n";
    out += "Observation: " + interaction.observation.content + "\n";
    return out;
}

std::string render_actor_output(const std::string& reasoning, const Action& action) {
    json j = action;
    if (reasoning.empty()) return "ACTION: " + j.dump();
    return reasoning + "\nACTION: " + j.dump();
}

PromptDocument assemble_actor_prompt(const Query& q, const ContextState& state,
                                     const BudgetConfig& cfg,
                                     std::span<const Interaction> unsummarized,
                                     const std::string& instructions) {
    (void)cfg;
    PromptDocument doc;
    doc.sections.emplace_back(kSectionQuery, q.text);

    if (!state.checklist.items.empty())
        doc.sections.emplace_back(kSectionChecklist, render_checklist(state.checklist));

    std::string memory_body;
    for (const auto& entry : state.memory.entries)
        memory_body += render_memory_entry(entry) + "\n";
    for (const auto& interaction : unsummarized)
        memory_body += render_interaction(interaction);
    if (!memory_body.empty())
        doc.sections.emplace_back(kSectionMemory, memory_body);

    if (state.last_interaction)
        doc.sections.emplace_back(kSectionLastInteraction,
                                  render_interaction(*state.last_interaction));

    doc.sections.emplace_back(kSectionInstructions, instructions);
    return doc;
}

std::pair<std::string, Action> parse_actor_output(const std::string& text) {
    constexpr std::string_view kPrefix = "ACTION:";

    // last line starting with ACTION:
    size_t action_line_start = std::string::npos;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        size_t len = (eol == std::string::npos ? text.size() : eol) - pos;
        if (text.compare(pos, kPrefix.size(), kPrefix) == 0)
            action_line_start = pos;
        if (eol == std::string::npos) break;
        pos = eol + 1;
        (void)len;
    }
    if (action_line_start == std::string::npos)
        throw ActorParseError(ActorParseError::Kind::no_action_line,
                              "no ACTION: line in actor output");

    size_t eol = text.find('\n', action_line_start);
    std::string payload = text.substr(
        action_line_start + kPrefix.size(),
        (eol == std::string::npos ? text.size() : eol) - action_line_start - kPrefix.size());

    json j;
    try {
        j = json::parse(payload);
        if (!j.is_object() || !j.contains("tool") || !j.contains("argument") ||
            !j["tool"].is_string() || !j["argument"].is_string())
            throw ActorParseError(ActorParseError::Kind::bad_action_json,
                                  "action is not a {tool, argument} object");
    } catch (const json::exception& e) {
        throw ActorParseError(ActorParseError::Kind::bad_action_json,
                              std::string("unparseable action JSON: ") + e.what());
    }

    Action action;
    try {
        action.tool = tool_from_string(j["tool"].get<std::string>());
    } catch (const Error&) {
        throw ActorParseError(ActorParseError::Kind::unknown_tool,
                              "unknown tool: " + j["tool"].get<std::string>());
    }
    action.argument = j["argument"].get<std::string>();

    std::string reasoning = text.substr(0, action_line_start);
    if (!reasoning.empty() && reasoning.back() == '\n') reasoning.pop_back();
    return {reasoning, action};
}

ChatRequest make_chat_request(RoleTag tag, const std::string& system,
                              const PromptDocument& prompt) {
    ChatRequest req;
    req.role_tag = tag;
    req.messages.push_back({"system", system});
    req.messages.push_back({"user", prompt.render()});
    return req;
}

ForcedAnswerResult forced_answer(const Query& q, const ContextState& state,
                                 std::span<const Interaction> unsummarized,
                                 Backend& backend, const BudgetConfig& cfg,
                                 const Templates& templates, int turn, int retries) {
    PromptDocument prompt = assemble_actor_prompt(q, state, cfg, unsummarized,
                                                  templates.forced_answer_instructions);
    ChatRequest req = make_chat_request(RoleTag::actor, templates.actor_system, prompt);

    for (int attempt = 0; attempt <= retries; ++attempt) {
        std::string reply;
        try {
            reply = backend.chat(req).text;
        } catch (const ScriptExhausted&) {
            break;
        } catch (const MalformedResponse&) {
            continue;
        }
        try {
            auto [reasoning, action] = parse_actor_output(reply);
            if (action.tool != Tool::answer) continue;
            Interaction interaction;
            interaction.turn = turn;
            interaction.reasoning = reasoning;
            interaction.action = action;
            interaction.observation = {"", "answer", false, 0};
            return {interaction, false};
        } catch (const ActorParseError&) {
            continue;
        }
    }

    Interaction interaction;
    interaction.turn = turn;
    interaction.reasoning = "";
    interaction.action = {Tool::answer, ""};
    interaction.observation = {"", "answer", false, 0};
    return {interaction, true};
}

}  // namespace arc
