#pragma once

#include <stdexcept>
#include <string>

namespace argox {

enum class ErrorKind {
    NotAState,
    ParseError,
    OrderError,
    GapError,
    ValueError,
    EmptyPanel,
    SeriesTooShort,
    InsufficientHistory,
    InvalidPenalty,
    InvalidInput,
    InsufficientRows,
    SingularDesign,
    NumericalFailure,
    ConstraintDegenerate,
    IncompleteWeek,
    EmptyEvaluation,
    ConfigError,
    IoError,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the whole engine; the kind tells callers
/// (and tests) which contract was violated.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(std::string(to_string(kind)) + ": " + msg), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
    throw Error(kind, msg);
}

}  // namespace argox
