#include "arc/datapipe.hpp"

#include <fstream>
#include <sstream>

#include "arc/errors.hpp"

namespace arc {

std::string trajectory_to_jsonl(const Trajectory& traj) {
    std::string out;
    json header{{"format", kTrajectoryFormat},
                {"version", kTrajectoryVersion},
                {"query", traj.query}};
    out += header.dump() + "\n";
    for (const auto& record : traj.turns) {
        json j = record;
        out += j.dump() + "\n";
    }
    json footer{{"final_answer", traj.final_answer},
                {"outcome", to_string(traj.outcome)},
                {"totals",
                 {{"turns", traj.totals.turns},
                  {"prompt_tokens", traj.totals.prompt_tokens},
                  {"reflections", traj.totals.reflections}}}};
    out += footer.dump() + "\n";
    return out;
}

void write_trajectory(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write trajectory file: " + path);
    out << trajectory_to_jsonl(traj);
    if (!out) throw IoError("write failed: " + path);
}

Trajectory trajectory_from_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;

    auto next_json = [&](json& j) -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            try {
                j = json::parse(line);
            } catch (const json::exception& e) {
                throw FormatError(lineno, std::string("malformed line: ") + e.what());
            }
            return true;
        }
        return false;
    };

    json j;
    if (!next_json(j)) throw FormatError(1, "missing header");
    if (j.value("format", "") != kTrajectoryFormat)
        throw FormatError(lineno, "not an arc-traj file");
    if (j.value("version", -1) != kTrajectoryVersion)
        throw FormatError(lineno, "unsupported trajectory version");

    Trajectory traj;
    traj.query = j.at("query").get<Query>();

    bool have_footer = false;
    while (next_json(j)) {
        if (j.contains("turn")) {
            try {
                traj.turns.push_back(j.get<TurnRecord>());
            } catch (const json::exception& e) {
                throw FormatError(lineno, std::string("bad turn record: ") + e.what());
            }
            continue;
        }
        if (j.contains("final_answer")) {
            try {
                traj.final_answer = j.at("final_answer").get<std::string>();
                traj.outcome = outcome_from_string(j.at("outcome").get<std::string>());
                const auto& totals = j.at("totals");
                traj.totals.turns = totals.at("turns").get<int>();
                traj.totals.prompt_tokens = totals.at("prompt_tokens").get<long>();
                traj.totals.reflections = totals.at("reflections").get<int>();
            } catch (const json::exception& e) {
                throw FormatError(lineno, std::string("bad footer: ") + e.what());
            }
            have_footer = true;
            break;
        }
        throw FormatError(lineno, "unrecognized record");
    }
    if (!have_footer) throw FormatError(lineno + 1, "missing footer");
    return traj;
}

Trajectory read_trajectory(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trajectory file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return trajectory_from_jsonl(buf.str());
}

ValidationResult validate_trajectory(const Trajectory& traj) {
    ValidationResult result;
    bool malformed_update = false;
    bool invalid_checklist = false;

    for (const auto& record : traj.turns) {
        if (record.cm_fallback || record.degraded_reflection) malformed_update = true;
        if (!memory_ranges_valid(record.state_after.memory)) malformed_update = true;
        if (!checklist_transition_valid(record.state_before.checklist,
                                        record.state_after.checklist,
                                        record.reflection_applied))
            invalid_checklist = true;
    }

    if (malformed_update) result.reasons.push_back("malformed_update");
    if (invalid_checklist) result.reasons.push_back("invalid_checklist");
    if (traj.outcome == Outcome::forced_failure) result.reasons.push_back("unrecoverable");
    result.keep = result.reasons.empty();
    return result;
}

void to_json(json& j, const SftExample& e) {
    j = json{{"query", e.query},
             {"prev_state", e.prev_state},
             {"interaction", e.interaction},
             {"target_state", e.target_state}};
}

void from_json(const json& j, SftExample& e) {
    j.at("query").get_to(e.query);
    j.at("prev_state").get_to(e.prev_state);
    j.at("interaction").get_to(e.interaction);
    j.at("target_state").get_to(e.target_state);
}

std::vector<SftExample> export_sft(const std::vector<Trajectory>& trajs) {
    std::vector<SftExample> examples;
    for (const auto& traj : trajs) {
        if (!validate_trajectory(traj).keep)
            throw UnvalidatedInput("rejected trajectory passed to export_sft: query " +
                                   traj.query.id);
        for (const auto& record : traj.turns) {
            if (!record.managed) continue;
            SftExample example;
            example.query = traj.query.text;
            example.prev_state = record.state_before;
            example.interaction = record.interaction;
            example.target_state = record.state_after;
            examples.push_back(std::move(example));
        }
    }
    return examples;
}

void write_sft_examples(const std::vector<SftExample>& examples, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write SFT file: " + path);
    for (const auto& example : examples) {
        json j = example;
        out << j.dump() << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

std::vector<SftExample> read_sft_examples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open SFT file: " + path);
    std::vector<SftExample> examples;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            examples.push_back(json::parse(line).get<SftExample>());
        } catch (const json::exception& e) {
            throw FormatError(lineno, std::string("bad SFT line: ") + e.what());
        }
    }
    return examples;
}

}  // namespace arc
