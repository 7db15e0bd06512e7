#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace invclt {

enum class ErrorCode {
    OddDimension,
    DimensionTooSmall,
    DimensionMismatch,
    AsymmetryExceedsTolerance,
    NonFinite,
    NotSquare,
    DegenerateArray,
    CapExceeded,
    EqualIndices,
    NoCaseMatched,
    InvalidP,
    EmptySample,
    ParseError,
    IoError,
};

std::string_view to_string(ErrorCode code);

// Every recoverable failure in the library is reported through this type.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::OddDimension: return "OddDimension";
        case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::AsymmetryExceedsTolerance: return "AsymmetryExceedsTolerance";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::NotSquare: return "NotSquare";
        case ErrorCode::DegenerateArray: return "DegenerateArray";
        case ErrorCode::CapExceeded: return "CapExceeded";
        case ErrorCode::EqualIndices: return "EqualIndices";
        case ErrorCode::NoCaseMatched: return "NoCaseMatched";
        case ErrorCode::InvalidP: return "InvalidP";
        case ErrorCode::EmptySample: return "EmptySample";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace invclt
