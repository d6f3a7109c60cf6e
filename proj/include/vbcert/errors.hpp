#pragma once

#include <stdexcept>
#include <string>

namespace vbcert {

enum class ErrorCode {
    SingularMatrix,
    NonFinite,
    NonConvergence,
    InvalidKernel,
    InvalidGamma,
    ShapeMismatch,
    Reducible,
    NotErgodic,
    NonPositiveXi,
    NonPositiveNu,
    NotPositiveDefinite,
    KindUnavailable,
    SingularAbar,
    NotHurwitz,
    TooLarge,
    RankDeficientFeatures,
    ParseError,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

// Input/assumption failures map to CLI exit code 2; internal failures to 1.
inline bool is_input_error(ErrorCode code) {
    return code != ErrorCode::SingularMatrix && code != ErrorCode::NonConvergence;
}

}  // namespace vbcert
