#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "arc/backends.hpp"
#include "arc/runtime.hpp"

namespace arc {

// Normalized exact match: lowercase, strip punctuation, collapse
// whitespace. Throws MissingGold when gold is empty.
bool judge_exact(const std::string& answer, const std::string& gold);

// Backend-judged mode behind the same interface (role_tag=judge); the
// backend reply must start with "yes" or "no".
bool judge_with_backend(const std::string& question, const std::string& answer,
                        const std::string& gold, Backend& backend);

// Mean over queries of [any of the first k trials correct] x 100.
double pass_at_k(const std::vector<std::vector<bool>>& per_query_trials, int k);

// Per-turn mean prompt tokens across trajectories reaching that turn.
std::vector<std::pair<int, double>> token_curve(const std::vector<Trajectory>& trajs);

// One Pass@1-style accuracy row per turn budget.
std::vector<std::pair<int, double>> accuracy_vs_turn_budget(
    const std::map<int, std::vector<Trajectory>>& trajs_by_budget,
    const std::function<bool(const Trajectory&)>& judge);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// Writes report.json plus one CSV per table under out_dir. Recognized
// metric keys: "pass_table" (rows of {framework, dataset, pass1, pass3}),
// "token_curve" (rows of {turn, mean_tokens}), "turn_budget" (rows of
// {budget, accuracy}).
void emit_report(const json& metrics, const std::string& out_dir);

}  // namespace arc
