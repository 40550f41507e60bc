#include "ncguard/errors.hpp"

namespace ncguard {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ZeroInverse: return "ZeroInverse";
    case Errc::ModulusMismatch: return "ModulusMismatch";
    case Errc::DimMismatch: return "DimMismatch";
    case Errc::Singular: return "Singular";
    case Errc::Inconsistent: return "Inconsistent";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::GenerationMismatch: return "GenerationMismatch";
    case Errc::ParameterGenFailure: return "ParameterGenFailure";
    case Errc::DecryptionFailure: return "DecryptionFailure";
    case Errc::DegenerateSpace: return "DegenerateSpace";
    case Errc::SingularPaddingSystem: return "SingularPaddingSystem";
    case Errc::SubsetTooSmall: return "SubsetTooSmall";
    case Errc::MissingCommitment: return "MissingCommitment";
    case Errc::ConfigError: return "ConfigError";
    case Errc::UnknownFixture: return "UnknownFixture";
  }
  return "Unknown";
}

}  // namespace ncguard
