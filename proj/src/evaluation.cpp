#include "arc/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>

#include "arc/errors.hpp"

namespace arc {

namespace {

std::string normalize_answer(const std::string& text) {
    std::string out;
    bool prev_space = false;
    for (char c : text) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::isalnum(u)) {
            out += static_cast<char>(std::tolower(u));
            prev_space = false;
        } else if (std::isspace(u) || std::ispunct(u)) {
            if (!out.empty() && !prev_space) {
                out += ' ';
                prev_space = true;
            }
        } else {
            out += c;  // pass non-ASCII bytes through untouched
            prev_space = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

}  // namespace

bool judge_exact(const std::string& answer, const std::string& gold) {
    if (gold.empty()) throw MissingGold("judge_exact called without a gold answer");
    return normalize_answer(answer) == normalize_answer(gold);
}

bool judge_with_backend(const std::string& question, const std::string& answer,
                        const std::string& gold, Backend& backend) {
    if (gold.empty()) throw MissingGold("backend judge called without a gold answer");
    ChatRequest req;
    req.role_tag = RoleTag::judge;
    req.temperature = 0.0;
    req.messages.push_back(
        {"system", "You grade answers. Reply with exactly \"yes\" or \"no\"."});
    req.messages.push_back({"user", "Question: " + question + "\nGold answer: " + gold +
                                        "\nCandidate answer: " + answer +
                                        "\nIs the candidate correct?"});
    std::string reply = backend.chat(req).text;
    std::string lowered;
    for (char c : reply) lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return lowered.rfind("yes", 0) == 0;
}

double pass_at_k(const std::vector<std::vector<bool>>& per_query_trials, int k) {
    if (per_query_trials.empty()) return 0.0;
    for (const auto& trials : per_query_trials)
        if (static_cast<int>(trials.size()) < k)
            throw InsufficientTrials("query has fewer than k trials");
    int passed = 0;
    for (const auto& trials : per_query_trials) {
        bool any = false;
        for (int i = 0; i < k; ++i) any = any || trials[i];
        if (any) ++passed;
    }
    return 100.0 * passed / static_cast<double>(per_query_trials.size());
}

std::vector<std::pair<int, double>> token_curve(const std::vector<Trajectory>& trajs) {
    size_t max_turns = 0;
    for (const auto& traj : trajs) max_turns = std::max(max_turns, traj.turns.size());

    std::vector<std::pair<int, double>> curve;
    for (size_t i = 0; i < max_turns; ++i) {
        double sum = 0.0;
        int n = 0;
        for (const auto& traj : trajs) {
            if (i < traj.turns.size()) {
                sum += static_cast<double>(traj.turns[i].prompt_tokens);
                ++n;
            }
        }
        curve.emplace_back(static_cast<int>(i) + 1, sum / n);
    }
    return curve;
}

std::vector<std::pair<int, double>> accuracy_vs_turn_budget(
    const std::map<int, std::vector<Trajectory>>& trajs_by_budget,
    const std::function<bool(const Trajectory&)>& judge) {
    std::vector<std::pair<int, double>> table;
    for (const auto& [budget, trajs] : trajs_by_budget) {
        std::vector<std::vector<bool>> per_query;
        for (const auto& traj : trajs) per_query.push_back({judge(traj)});
        table.emplace_back(budget, pass_at_k(per_query, 1));
    }
    return table;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write CSV: " + path);
    for (size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows)
        for (size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "\n");
    if (!out) throw IoError("write failed: " + path);
}

void emit_report(const json& metrics, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::filesystem::path dir(out_dir);

    {
        std::ofstream out(dir / "report.json");
        if (!out) throw IoError("cannot write report.json in " + out_dir);
        out << metrics.dump(2) << "\n";
    }

    if (metrics.contains("pass_table")) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& row : metrics["pass_table"])
            rows.push_back({row.value("framework", ""), row.value("dataset", ""),
                            std::to_string(row.value("pass1", 0.0)),
                            std::to_string(row.value("pass3", 0.0))});
        write_csv((dir / "pass_table.csv").string(),
                  {"framework", "dataset", "pass1", "pass3"}, rows);
    }
    if (metrics.contains("token_curve")) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& row : metrics["token_curve"])
            rows.push_back({std::to_string(row.at("turn").get<int>()),
                            std::to_string(row.at("mean_tokens").get<double>())});
        write_csv((dir / "token_curve.csv").string(), {"turn", "mean_tokens"}, rows);
    }
    if (metrics.contains("turn_budget")) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& row : metrics["turn_budget"])
            rows.push_back({std::to_string(row.at("budget").get<int>()),
                            std::to_string(row.at("accuracy").get<double>())});
        write_csv((dir / "turn_budget.csv").string(), {"budget", "accuracy"}, rows);
    }
}

}  // namespace arc
