#pragma once

#include <stdexcept>
#include <string>

namespace goerw {

enum class ErrorKind {
    InvalidArgument,
    Cycle,
    Disconnected,
    DuplicateChild,
    MissingRoot,
    NonDenseIds,
    SizeGuard,
    NearCritical,
    RareEvent,
    StepCap,
    Parse,
};

const char* to_string(ErrorKind kind) noexcept;

// Single exception type for the library; `kind()` lets callers (the CLI in
// particular) map failures to exit codes without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    // Usage errors are the caller's fault; everything else is a runtime refusal.
    bool is_usage_error() const noexcept {
        return kind_ == ErrorKind::InvalidArgument || kind_ == ErrorKind::Parse;
    }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool cond, const std::string& what) {
    if (!cond)
        throw Error(ErrorKind::InvalidArgument, what);
}

}  // namespace goerw
