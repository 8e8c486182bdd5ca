#pragma once

#include <stdexcept>
#include <string>

namespace arc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct TransportError : Error {
    using Error::Error;
};

struct ScriptExhausted : Error {
    using Error::Error;
};

struct MalformedResponse : Error {
    using Error::Error;
};

// Actor output that cannot be turned into an Action. Retryable.
struct ActorParseError : Error {
    enum class Kind { no_action_line, bad_action_json, unknown_tool };
    Kind kind;
    ActorParseError(Kind k, const std::string& msg) : Error(msg), kind(k) {}
};

struct IoError : Error {
    using Error::Error;
};

struct FormatError : Error {
    int line;
    FormatError(int ln, const std::string& msg)
        : Error(msg + " (line " + std::to_string(ln) + ")"), line(ln) {}
};

struct DuplicateDocId : Error {
    using Error::Error;
};

struct UnvalidatedInput : Error {
    using Error::Error;
};

struct MissingGold : Error {
    using Error::Error;
};

struct InsufficientTrials : Error {
    using Error::Error;
};

}  // namespace arc
