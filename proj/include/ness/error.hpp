#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ness {

enum class ErrorCode {
    NotSquare,
    NotHermitian,
    NotPsd,
    DimensionMismatch,
    SingularGenerator,
    DegenerateChannels,
    Unstable,
    NumericallyMarginal,
    DegenerateSpectrum,
    NotUnitary,
    SymbolNotPsd,
    InvalidHopping,
    InvalidArgument,
    SolverFailure,
    ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` distinguishes failure modes.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace ness
