#include "fohs/error.hpp"

namespace fohs {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonSquare: return "NonSquare";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DefectiveMatrix: return "DefectiveMatrix";
    case ErrorKind::BranchCutEigenvalue: return "BranchCutEigenvalue";
    case ErrorKind::OrderOutOfRange: return "OrderOutOfRange";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::SubsystemUnstable: return "SubsystemUnstable";
    case ErrorKind::ImproperTransferFunction: return "ImproperTransferFunction";
    case ErrorKind::IncommensurateOrders: return "IncommensurateOrders";
    case ErrorKind::SingularResolvent: return "SingularResolvent";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::ZenoGuard: return "ZenoGuard";
    case ErrorKind::Schema: return "Schema";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

} // namespace fohs
