#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qwalk {

enum class ErrorCode {
  InvalidArgument,
  NonFinite,
  IndexOutOfRange,
  DimensionMismatch,
  InvalidCsr,
  UnsupportedEngineKind,
  AlreadyStopped,
  EngineStopped,
  ForeignHandle,
  NonSquare,
  NotSymmetric,
  SelfLoopPresent,
  WeightedEdge,
  SizeTooSmall,
  VertexOutOfRange,
  NotAnArc,
  MarkedVertexOutOfRange,
  SeriesNotConverged,
  UnnormalizedInitialState,
  BasisMismatch,
  UnsupportedGraphForPersistentShift,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidCsr: return "InvalidCsr";
    case ErrorCode::UnsupportedEngineKind: return "UnsupportedEngineKind";
    case ErrorCode::AlreadyStopped: return "AlreadyStopped";
    case ErrorCode::EngineStopped: return "EngineStopped";
    case ErrorCode::ForeignHandle: return "ForeignHandle";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::SelfLoopPresent: return "SelfLoopPresent";
    case ErrorCode::WeightedEdge: return "WeightedEdge";
    case ErrorCode::SizeTooSmall: return "SizeTooSmall";
    case ErrorCode::VertexOutOfRange: return "VertexOutOfRange";
    case ErrorCode::NotAnArc: return "NotAnArc";
    case ErrorCode::MarkedVertexOutOfRange: return "MarkedVertexOutOfRange";
    case ErrorCode::SeriesNotConverged: return "SeriesNotConverged";
    case ErrorCode::UnnormalizedInitialState: return "UnnormalizedInitialState";
    case ErrorCode::BasisMismatch: return "BasisMismatch";
    case ErrorCode::UnsupportedGraphForPersistentShift: return "UnsupportedGraphForPersistentShift";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above; the
/// message is prefixed with the code name.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qwalk
