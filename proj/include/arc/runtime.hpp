#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "arc/actor.hpp"
#include "arc/backends.hpp"
#include "arc/budget.hpp"
#include "arc/context_manager.hpp"
#include "arc/core.hpp"
#include "arc/environment.hpp"
#include "arc/templates.hpp"

namespace arc {

struct EpisodeConfig {
    BudgetConfig budget;
    ManagementPolicy policy;
    CmCapabilities caps = CmCapabilities::full();
    std::uint64_t seed = 0;
    std::shared_ptr<Backend> actor_backend;
    std::shared_ptr<Backend> cm_backend;  // unused by react_raw
    std::shared_ptr<ToolEnvironment> environment;
    Templates templates = Templates::defaults();
    int search_top_k = 5;
    int actor_parse_retries = 2;
    int reflection_cooldown_turns = 2;  // at most one reflection per this many turns
    int heuristic_window = 3;

    void validate() const;  // throws ConfigError
};

enum class Outcome { answered, forced_answer, forced_failure };

std::string to_string(Outcome o);
Outcome outcome_from_string(const std::string& s);

struct TurnRecord {
    int turn = 0;
    ContextState state_before;
    Interaction interaction;
    ContextState state_after;
    bool reflection_applied = false;
    long prompt_tokens = 0;
    bool managed = false;             // summarize and/or reflect ran this turn
    bool cm_fallback = false;         // mechanical summary entry was used
    bool degraded_reflection = false; // reflection triggered but CM reply unusable

    bool operator==(const TurnRecord&) const = default;
};

struct Trajectory {
    Query query;
    std::vector<TurnRecord> turns;
    std::string final_answer;
    Outcome outcome = Outcome::answered;
    struct Totals {
        int turns = 0;
        long prompt_tokens = 0;
        int reflections = 0;
        bool operator==(const Totals&) const = default;
    } totals;

    bool operator==(const Trajectory&) const = default;
};

void to_json(json& j, const TurnRecord& r);
void from_json(const json& j, TurnRecord& r);

Trajectory run_episode(const Query& q, const EpisodeConfig& cfg);

// `trials` independent episodes per query, up to `parallelism` running
// concurrently. make_cfg builds each episode's config so scripted
// backends can be instantiated per episode; results are ordered by
// (query, trial) regardless of scheduling. Per-episode failures are
// recorded as forced_failure trajectories, never abort the batch.
std::vector<Trajectory> run_batch(
    const std::vector<Query>& queries, int trials, int parallelism,
    const std::function<EpisodeConfig(const Query& q, int trial)>& make_cfg);

}  // namespace arc
