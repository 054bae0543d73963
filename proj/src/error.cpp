#include "ncv/error.hpp"

namespace ncv {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput:
      return "InvalidInput";
    case ErrorKind::kDegenerateInput:
      return "DegenerateInput";
    case ErrorKind::kDecompositionFailure:
      return "DecompositionFailure";
    case ErrorKind::kDualDomainExceeded:
      return "DualDomainExceeded";
    case ErrorKind::kNoMinimizer:
      return "NoMinimizer";
    case ErrorKind::kInfeasibleSelection:
      return "InfeasibleSelection";
    case ErrorKind::kComboMismatch:
      return "ComboMismatch";
    case ErrorKind::kCertificateFailure:
      return "CertificateFailure";
    case ErrorKind::kInfeasibleGrid:
      return "InfeasibleGrid";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message) {}

}  // namespace ncv
