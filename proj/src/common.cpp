#include "vaxsite/common.hpp"

namespace vaxsite {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kEmptyFile: return "EmptyFile";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kDuplicateDistrict: return "DuplicateDistrict";
    case ErrorCode::kUnknownDistrict: return "UnknownDistrict";
    case ErrorCode::kNegativeCount: return "NegativeCount";
    case ErrorCode::kCommutersExceedPopulation: return "CommutersExceedPopulation";
    case ErrorCode::kMissingPair: return "MissingPair";
    case ErrorCode::kNegativeTime: return "NegativeTime";
    case ErrorCode::kNonZeroDiagonal: return "NonZeroDiagonal";
    case ErrorCode::kPeriodOutOfRange: return "PeriodOutOfRange";
    case ErrorCode::kNegativeDoses: return "NegativeDoses";
    case ErrorCode::kSiteNotOpen: return "SiteNotOpen";
    case ErrorCode::kStateOutOfRange: return "StateOutOfRange";
    case ErrorCode::kNonFiniteState: return "NonFiniteState";
    case ErrorCode::kDegenerateForce: return "DegenerateForce";
    case ErrorCode::kZeroPrevalence: return "ZeroPrevalence";
    case ErrorCode::kZeroFlow: return "ZeroFlow";
    case ErrorCode::kZeroCapacity: return "ZeroCapacity";
    case ErrorCode::kInfeasibleByConstruction: return "InfeasibleByConstruction";
    case ErrorCode::kBadK: return "BadK";
    case ErrorCode::kNegativeWeight: return "NegativeWeight";
    case ErrorCode::kTooManySites: return "TooManySites";
    case ErrorCode::kInfeasiblePlan: return "InfeasiblePlan";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kUnknownVariable: return "UnknownVariable";
    case ErrorCode::kNonIntegralValue: return "NonIntegralValue";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kOptimizerDiverged: return "OptimizerDiverged";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kInvariantBreach: return "InvariantBreach";
  }
  return "Unknown";
}

}  // namespace vaxsite
