#pragma once

#include <string>

namespace arc {

// Prompt template texts for the actor and the context manager. Defaults
// are compiled in; load_dir overrides any template whose file exists in
// the given directory (one .txt file per field).
struct Templates {
    std::string actor_system;
    std::string actor_instructions;
    std::string forced_answer_instructions;
    std::string cm_system;
    std::string cm_init_instructions;
    std::string cm_summarize_instructions;
    std::string cm_reflect_instructions;
    std::string resum_instructions;

    static Templates defaults();
    static Templates load_dir(const std::string& dir);
};

}  // namespace arc
