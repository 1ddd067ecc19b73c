#pragma once

#include <stdexcept>
#include <string>

namespace rea {

// Machine-readable error codes; the CLI prints them as `ERROR <code> <message>`.
enum class ErrorCode {
    config,
    alignment,
    window_exhausted,
    divergence,
    empty_input,
    domain,
    estimation,
    io,
    usage,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::config: return "CONFIG";
        case ErrorCode::alignment: return "ALIGNMENT";
        case ErrorCode::window_exhausted: return "WINDOW_EXHAUSTED";
        case ErrorCode::divergence: return "DIVERGENCE";
        case ErrorCode::empty_input: return "EMPTY_INPUT";
        case ErrorCode::domain: return "DOMAIN";
        case ErrorCode::estimation: return "ESTIMATION";
        case ErrorCode::io: return "IO";
        case ErrorCode::usage: return "USAGE";
    }
    return "UNKNOWN";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace rea
