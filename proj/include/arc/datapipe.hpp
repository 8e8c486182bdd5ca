#pragma once

#include <string>
#include <vector>

#include "arc/core.hpp"
#include "arc/runtime.hpp"

namespace arc {

inline constexpr const char* kTrajectoryFormat = "arc-traj";
inline constexpr int kTrajectoryVersion = 1;

// JSONL: header record, one TurnRecord per line, footer record.
void write_trajectory(const Trajectory& traj, const std::string& path);
std::string trajectory_to_jsonl(const Trajectory& traj);
Trajectory read_trajectory(const std::string& path);
Trajectory trajectory_from_jsonl(const std::string& text);

struct ValidationResult {
    bool keep = false;
    std::vector<std::string> reasons;  // malformed_update / invalid_checklist / unrecoverable
};

// Trajectory filtering for CM training data: reject malformed context
// updates (memory-range violations, fallback or degraded turns), invalid
// checklist transitions, and unrecoverable execution failures.
ValidationResult validate_trajectory(const Trajectory& traj);

struct SftExample {
    std::string query;
    ContextState prev_state;   // C_{t-1}
    Interaction interaction;   // I_t
    ContextState target_state; // C_t

    bool operator==(const SftExample&) const = default;
};

void to_json(json& j, const SftExample& e);
void from_json(const json& j, SftExample& e);

// One example per CM-managed turn of each trajectory. Throws
// UnvalidatedInput when a trajectory fails validate_trajectory.
std::vector<SftExample> export_sft(const std::vector<Trajectory>& trajs);

void write_sft_examples(const std::vector<SftExample>& examples, const std::string& path);
std::vector<SftExample> read_sft_examples(const std::string& path);

}  // namespace arc
