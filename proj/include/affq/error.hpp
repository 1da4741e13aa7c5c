#ifndef AFFQ_ERROR_HPP
#define AFFQ_ERROR_HPP

#include <stdexcept>
#include <string>

namespace affq {

enum class ErrorCode {
    BadSpec,
    NonConvex,
    NonPositiveRadial,
    BadRatio,
    Unsupported,
    EmptyGrid,
    BracketNotFound,
    GraphSplitFailure,
    NoSignChange,
    FrameNotCritical,
    Degenerate,
    PoincareHopfViolation,
    NotReached,
    ExcessiveDegeneracy,
};

inline const char* to_string(ErrorCode c) {
    switch (c) {
        case ErrorCode::BadSpec: return "BadSpec";
        case ErrorCode::NonConvex: return "NonConvex";
        case ErrorCode::NonPositiveRadial: return "NonPositiveRadial";
        case ErrorCode::BadRatio: return "BadRatio";
        case ErrorCode::Unsupported: return "Unsupported";
        case ErrorCode::EmptyGrid: return "EmptyGrid";
        case ErrorCode::BracketNotFound: return "BracketNotFound";
        case ErrorCode::GraphSplitFailure: return "GraphSplitFailure";
        case ErrorCode::NoSignChange: return "NoSignChange";
        case ErrorCode::FrameNotCritical: return "FrameNotCritical";
        case ErrorCode::Degenerate: return "Degenerate";
        case ErrorCode::PoincareHopfViolation: return "PoincareHopfViolation";
        case ErrorCode::NotReached: return "NotReached";
        case ErrorCode::ExcessiveDegeneracy: return "ExcessiveDegeneracy";
    }
    return "Unknown";
}

// Errors that signal a broken mathematical invariant rather than bad input.
inline bool is_invariant_failure(ErrorCode c) {
    return c == ErrorCode::PoincareHopfViolation || c == ErrorCode::GraphSplitFailure ||
           c == ErrorCode::ExcessiveDegeneracy;
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& where, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + " in " + where + ": " + what),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace affq

#endif  // AFFQ_ERROR_HPP
