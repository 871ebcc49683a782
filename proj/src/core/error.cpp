#include "rdsdiag/error.hpp"

namespace rdsdiag {

ErrorFamily family_of(ErrorCode code) noexcept {
  const int v = static_cast<int>(code);
  switch (v / 100) {
    case 1: return ErrorFamily::Config;
    case 2: return ErrorFamily::Ingestion;
    case 3: return ErrorFamily::Analysis;
    case 4: return ErrorFamily::Simulation;
    case 5: return ErrorFamily::Render;
    case 6: return ErrorFamily::Io;
    default: return ErrorFamily::Internal;
  }
}

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::MissingData: return "MissingData";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DanglingCoupon: return "DanglingCoupon";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::NonContiguousOrder: return "NonContiguousOrder";
    case ErrorCode::OrderViolation: return "OrderViolation";
    case ErrorCode::DuplicateCoupon: return "DuplicateCoupon";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidTrait: return "InvalidTrait";
    case ErrorCode::InvalidFollowUp: return "InvalidFollowUp";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::MissingInput: return "MissingInput";
    case ErrorCode::UnknownTrait: return "UnknownTrait";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::ZeroDegree: return "ZeroDegree";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::TooFewTrees: return "TooFewTrees";
    case ErrorCode::PopulationTooSmall: return "PopulationTooSmall";
    case ErrorCode::NoData: return "NoData";
    case ErrorCode::NoEligibleRecruiters: return "NoEligibleRecruiters";
    case ErrorCode::ImpossibleCounts: return "ImpossibleCounts";
    case ErrorCode::DegenerateTable: return "DegenerateTable";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::MissingTarget: return "MissingTarget";
    case ErrorCode::UnrealizableConfig: return "UnrealizableConfig";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::WriteFailed: return "WriteFailed";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

std::string_view to_string(ErrorFamily family) noexcept {
  switch (family) {
    case ErrorFamily::Config: return "config";
    case ErrorFamily::Ingestion: return "ingestion";
    case ErrorFamily::Analysis: return "analysis";
    case ErrorFamily::Simulation: return "simulation";
    case ErrorFamily::Render: return "render";
    case ErrorFamily::Io: return "io";
    case ErrorFamily::Internal: return "internal";
  }
  return "internal";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace rdsdiag
