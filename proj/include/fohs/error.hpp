#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fohs {

enum class ErrorKind {
    InvalidArgument,
    NonSquare,
    DimensionMismatch,
    DefectiveMatrix,
    BranchCutEigenvalue,
    OrderOutOfRange,
    NumericalFailure,
    SubsystemUnstable,
    ImproperTransferFunction,
    IncommensurateOrders,
    SingularResolvent,
    ConvergenceFailure,
    StepTooLarge,
    ZenoGuard,
    Schema,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (CLI exit
// codes, Python bindings) can dispatch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    // Message without the kind prefix.
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

} // namespace fohs
