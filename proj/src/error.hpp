#pragma once

#include <stdexcept>
#include <string>

namespace minmax {

enum class ErrorCode {
  Config,
  PointNotOnBoundary,
  NotUniformlyConvex,
  PointOutsideDomain,
  DegenerateGeometry,
  EmptyFamily,
  NotDisjoint,
  NoCommonBoundary,
  ClassViolation,
  StepDiverged,
  BudgetTooSmall,
  NotGraphical,
  EstimateViolated,
  HypothesisViolated,
  TooFewSets,
  RadiiTooClose,
  CoverageGap,
  BarrierBlocked,
  NotTransversal,
  NotStationary,
  EvenCount,
  AngleOutOfRange,
  Io,
  Internal,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Config: return "Config";
    case ErrorCode::PointNotOnBoundary: return "PointNotOnBoundary";
    case ErrorCode::NotUniformlyConvex: return "NotUniformlyConvex";
    case ErrorCode::PointOutsideDomain: return "PointOutsideDomain";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::EmptyFamily: return "EmptyFamily";
    case ErrorCode::NotDisjoint: return "NotDisjoint";
    case ErrorCode::NoCommonBoundary: return "NoCommonBoundary";
    case ErrorCode::ClassViolation: return "ClassViolation";
    case ErrorCode::StepDiverged: return "StepDiverged";
    case ErrorCode::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::NotGraphical: return "NotGraphical";
    case ErrorCode::EstimateViolated: return "EstimateViolated";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::TooFewSets: return "TooFewSets";
    case ErrorCode::RadiiTooClose: return "RadiiTooClose";
    case ErrorCode::CoverageGap: return "CoverageGap";
    case ErrorCode::BarrierBlocked: return "BarrierBlocked";
    case ErrorCode::NotTransversal: return "NotTransversal";
    case ErrorCode::NotStationary: return "NotStationary";
    case ErrorCode::EvenCount: return "EvenCount";
    case ErrorCode::AngleOutOfRange: return "AngleOutOfRange";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace minmax
