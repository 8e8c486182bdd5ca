#pragma once

#include <string_view>

namespace arc {

struct PromptDocument;

struct BudgetConfig {
    int max_context_tokens = 32000;
    int max_turns = 80;
    int observation_cap_tokens = 2048;
    int forced_answer_reserve_tokens = 1024;
};

// Deterministic approximate tokenizer: each maximal run of non-whitespace
// characters contributes ceil(len/4) tokens. Backend-agnostic; a
// backend-reported counter can be swapped in behind the same call sites.
int count_tokens(std::string_view text);

// Truncate text to at most `cap` tokens under count_tokens. When the text
// is cut, the result counts exactly `cap` tokens.
std::string truncate_to_tokens(std::string_view text, int cap, bool* truncated = nullptr);

int context_size(const PromptDocument& prompt);

bool fits_budget(long size, const BudgetConfig& cfg);

}  // namespace arc
