#include "arc/budget.hpp"

#include <cctype>

#include "arc/actor.hpp"

namespace arc {

namespace {

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

int count_tokens(std::string_view text) {
    int tokens = 0;
    size_t i = 0;
    while (i < text.size()) {
        if (is_space(text[i])) {
            ++i;
            continue;
        }
        size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        size_t len = i - start;
        tokens += static_cast<int>((len + 3) / 4);
    }
    return tokens;
}

std::string truncate_to_tokens(std::string_view text, int cap, bool* truncated) {
    if (truncated) *truncated = false;
    int used = 0;
    size_t i = 0;
    while (i < text.size()) {
        if (is_space(text[i])) {
            ++i;
            continue;
        }
        size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        size_t len = i - start;
        int cost = static_cast<int>((len + 3) / 4);
        if (used + cost > cap) {
            // cut inside this run so the kept prefix counts exactly cap tokens
            int remaining = cap - used;
            size_t keep = start + static_cast<size_t>(remaining) * 4;
            if (truncated) *truncated = true;
            return std::string(text.substr(0, keep));
        }
        used += cost;
    }
    return std::string(text);
}

int context_size(const PromptDocument& prompt) {
    int total = 0;
    for (const auto& [label, body] : prompt.sections) {
        total += count_tokens(label);
        total += count_tokens(body);
    }
    return total;
}

bool fits_budget(long size, const BudgetConfig& cfg) {
    return size <= static_cast<long>(cfg.max_context_tokens) -
                       static_cast<long>(cfg.forced_answer_reserve_tokens);
}

}  // namespace arc
