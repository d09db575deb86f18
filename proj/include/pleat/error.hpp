#pragma once

#include <stdexcept>
#include <string>

namespace pleat
{

/** @brief Stable error codes surfaced by every module */
enum class ErrorCode {
    WordEmpty,
    WordNotMixed,
    TooFewSyllables,
    NotAnosov,
    Parse,
    DimensionMismatch,
    Infeasible,
    OutOfRange,
    AngleSum,
    Boundary,
    NotConverged,
    Degenerate,
    NoContraction,
};

inline const char* code_name(ErrorCode c)
{
    switch (c) {
        case ErrorCode::WordEmpty:
            return "EWordEmpty";
        case ErrorCode::WordNotMixed:
            return "EWordNotMixed";
        case ErrorCode::TooFewSyllables:
            return "ETooFewSyllables";
        case ErrorCode::NotAnosov:
            return "ENotAnosov";
        case ErrorCode::Parse:
            return "EParse";
        case ErrorCode::DimensionMismatch:
            return "EDimensionMismatch";
        case ErrorCode::Infeasible:
            return "EInfeasible";
        case ErrorCode::OutOfRange:
            return "EOutOfRange";
        case ErrorCode::AngleSum:
            return "EAngleSum";
        case ErrorCode::Boundary:
            return "EBoundary";
        case ErrorCode::NotConverged:
            return "ENotConverged";
        case ErrorCode::Degenerate:
            return "EDegenerate";
        case ErrorCode::NoContraction:
            return "ENoContraction";
    }
    return "EUnknown";
}

/** @brief Exception carrying an ErrorCode */
class Error : public std::runtime_error
{
public:
    Error(ErrorCode c, const std::string& msg)
        : std::runtime_error(std::string(code_name(c)) + ": " + msg), code_(c), message_(msg)
    {
    }

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    /** Message without the code prefix */
    [[nodiscard]] const std::string& message() const noexcept { return message_; }

private:
    ErrorCode code_;
    std::string message_;
};

}  // namespace pleat
