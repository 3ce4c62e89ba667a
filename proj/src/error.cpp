#include "spdflow/error.hpp"

namespace spdflow {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::NotSpd: return "NotSpd";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::NotSymplectic: return "NotSymplectic";
    case ErrorKind::ModelEvalFailure: return "ModelEvalFailure";
    case ErrorKind::ReferenceLeftManifold: return "ReferenceLeftManifold";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace spdflow
