#pragma once

#include <stdexcept>
#include <string>

namespace latcov {

enum class ErrorCode {
    NotLatticePoint,
    ZeroVector,
    NotPrimitive,
    MinimaTooLarge,
    BoxTooSmall,
    RecursionGuard,
    TooManyPoints,
    TooManyFlats,
    RetriesExhausted,
    ParamOutOfRange,
    NoValidPrime,
    LiftNotFound,
    BodyNotBall,
    NotPositiveDefinite,
    DegenerateSeries,
    TooLarge,
    ScaleTooSmall,
    Singular,
    Parse,
    Verification,
};

const char* error_name(ErrorCode c);

// Exit-code class used by the CLI: 2 verification, 3 guard/resource, 4 usage.
int error_exit_code(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode c, const std::string& msg)
        : std::runtime_error(std::string(error_name(c)) + ": " + msg), code_(c) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode c, const std::string& msg) { throw Error(c, msg); }

}  // namespace latcov
