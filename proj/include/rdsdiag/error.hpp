#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rdsdiag {

// Every failure the toolkit can raise. Values are stable: the C API exposes
// them unchanged.
enum class ErrorCode : int {
  // configuration / usage
  InvalidConfig = 100,
  UnknownKind = 101,
  // ingestion
  MissingData = 200,
  MissingColumn = 201,
  DuplicateId = 202,
  DanglingCoupon = 203,
  CycleDetected = 204,
  NonContiguousOrder = 205,
  OrderViolation = 206,
  DuplicateCoupon = 207,
  ParseError = 208,
  InvalidTrait = 209,
  InvalidFollowUp = 210,
  UnknownId = 211,
  MissingInput = 212,  // an input file cannot be opened
  // analysis
  UnknownTrait = 300,
  EmptySample = 301,
  ZeroDegree = 302,
  EmptySeries = 303,
  TooFewTrees = 304,
  PopulationTooSmall = 305,
  NoData = 306,
  NoEligibleRecruiters = 307,
  ImpossibleCounts = 308,
  DegenerateTable = 309,
  InsufficientData = 310,
  MissingTarget = 311,
  // simulation
  UnrealizableConfig = 400,
  // rendering
  EmptyData = 500,
  // io
  FileNotFound = 600,
  WriteFailed = 601,
  // anything else
  Internal = 900,
};

enum class ErrorFamily : int {
  Config = 1,
  Ingestion = 2,
  Analysis = 3,
  Simulation = 4,
  Render = 5,
  Io = 6,
  Internal = 9,
};

ErrorFamily family_of(ErrorCode code) noexcept;
std::string_view to_string(ErrorCode code) noexcept;
std::string_view to_string(ErrorFamily family) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  ErrorFamily family() const noexcept { return family_of(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace rdsdiag
