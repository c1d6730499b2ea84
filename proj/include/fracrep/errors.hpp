#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fracrep {

enum class ErrorCode {
    PoleValue,
    DivergentSeries,
    NonConvergence,
    OutOfDomain,
    OrderTooHigh,
    InvalidOrder,
    InvalidArgument,
    GridTooCoarse,
    SizeOverflow,
    ModeDivergence,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::PoleValue: return "PoleValue";
        case ErrorCode::DivergentSeries: return "DivergentSeries";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::OrderTooHigh: return "OrderTooHigh";
        case ErrorCode::InvalidOrder: return "InvalidOrder";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::GridTooCoarse: return "GridTooCoarse";
        case ErrorCode::SizeOverflow: return "SizeOverflow";
        case ErrorCode::ModeDivergence: return "ModeDivergence";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace fracrep
