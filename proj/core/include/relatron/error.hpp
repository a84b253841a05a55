#pragma once

#include <stdexcept>
#include <string>

namespace relatron {

// Machine-readable failure causes surfaced to callers and the CLI.
enum class ErrorCode {
  // ingestion
  MissingFile,
  ParseError,
  UnknownTable,
  UnknownColumn,
  UnknownColumnKind,
  DuplicateTable,
  DuplicatePrimaryKey,
  BadTimestamp,
  BadLabel,
  BadSplit,
  EmptySplit,
  UnknownEntity,
  // graph / metapaths
  UnknownNodeType,
  UnknownEdgeType,
  // homophily
  NoLabeledEdges,
  DegenerateLabels,
  DegenerateClassMass,
  EmptyProfile,
  // sketch / probes
  OracleTooLarge,
  SingularFit,
  SingleClass,
  EmptyFeatures,
  // landscape
  MissingCenter,
  NonMonotoneGrid,
  NonFiniteLoss,
  InconsistentRay,
  IrregularGrid,
  MissingRays,
  CrossFamilyComparison,
  // bank / meta
  IncompleteTask,
  DegenerateRanking,
  SingleFamilyBank,
  TooFewTasks,
  DivergedProjection,
  RegistryMismatch,
  // metrics
  DegenerateMetric,
  // search
  EmptySpace,
  // io
  FormatVersionMismatch,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownTable: return "UnknownTable";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::UnknownColumnKind: return "UnknownColumnKind";
    case ErrorCode::DuplicateTable: return "DuplicateTable";
    case ErrorCode::DuplicatePrimaryKey: return "DuplicatePrimaryKey";
    case ErrorCode::BadTimestamp: return "BadTimestamp";
    case ErrorCode::BadLabel: return "BadLabel";
    case ErrorCode::BadSplit: return "BadSplit";
    case ErrorCode::EmptySplit: return "EmptySplit";
    case ErrorCode::UnknownEntity: return "UnknownEntity";
    case ErrorCode::UnknownNodeType: return "UnknownNodeType";
    case ErrorCode::UnknownEdgeType: return "UnknownEdgeType";
    case ErrorCode::NoLabeledEdges: return "NoLabeledEdges";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::DegenerateClassMass: return "DegenerateClassMass";
    case ErrorCode::EmptyProfile: return "EmptyProfile";
    case ErrorCode::OracleTooLarge: return "OracleTooLarge";
    case ErrorCode::SingularFit: return "SingularFit";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::EmptyFeatures: return "EmptyFeatures";
    case ErrorCode::MissingCenter: return "MissingCenter";
    case ErrorCode::NonMonotoneGrid: return "NonMonotoneGrid";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::InconsistentRay: return "InconsistentRay";
    case ErrorCode::IrregularGrid: return "IrregularGrid";
    case ErrorCode::MissingRays: return "MissingRays";
    case ErrorCode::CrossFamilyComparison: return "CrossFamilyComparison";
    case ErrorCode::IncompleteTask: return "IncompleteTask";
    case ErrorCode::DegenerateRanking: return "DegenerateRanking";
    case ErrorCode::SingleFamilyBank: return "SingleFamilyBank";
    case ErrorCode::TooFewTasks: return "TooFewTasks";
    case ErrorCode::DivergedProjection: return "DivergedProjection";
    case ErrorCode::RegistryMismatch: return "RegistryMismatch";
    case ErrorCode::DegenerateMetric: return "DegenerateMetric";
    case ErrorCode::EmptySpace: return "EmptySpace";
    case ErrorCode::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace relatron
