#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zetachain {

enum class Errc {
  // hypgeo
  NegativeDeterminant,
  NotHyperbolic,
  FixedPointAtInfinity,
  NonpositiveRadius,
  DisksOverlap,
  NonpositiveSide,
  // schemes
  NonpositiveLength,
  IsometricCirclesOverlap,
  TriangleConditionViolated,
  NewtonDivergence,
  BelowLengthThreshold,
  // symdyn
  CapExceeded,
  NotClosed,
  WrongKind,
  // zeta
  OrderExceedsDatabase,
  ConvergenceRegionViolated,
  // roots
  DerivativeVanished,
  ContourTooCloseToZero,
  NonIntegerResult,
  NoSignChange,
  // chains
  NonpositiveEntry,
  IterationStalled,
  WindowMismatch,
  BoundaryTouchesChain,
  // cli
  UsageError,
};

constexpr std::string_view errc_name(Errc e) {
  switch (e) {
    case Errc::NegativeDeterminant: return "NegativeDeterminant";
    case Errc::NotHyperbolic: return "NotHyperbolic";
    case Errc::FixedPointAtInfinity: return "FixedPointAtInfinity";
    case Errc::NonpositiveRadius: return "NonpositiveRadius";
    case Errc::DisksOverlap: return "DisksOverlap";
    case Errc::NonpositiveSide: return "NonpositiveSide";
    case Errc::NonpositiveLength: return "NonpositiveLength";
    case Errc::IsometricCirclesOverlap: return "IsometricCirclesOverlap";
    case Errc::TriangleConditionViolated: return "TriangleConditionViolated";
    case Errc::NewtonDivergence: return "NewtonDivergence";
    case Errc::BelowLengthThreshold: return "BelowLengthThreshold";
    case Errc::CapExceeded: return "CapExceeded";
    case Errc::NotClosed: return "NotClosed";
    case Errc::WrongKind: return "WrongKind";
    case Errc::OrderExceedsDatabase: return "OrderExceedsDatabase";
    case Errc::ConvergenceRegionViolated: return "ConvergenceRegionViolated";
    case Errc::DerivativeVanished: return "DerivativeVanished";
    case Errc::ContourTooCloseToZero: return "ContourTooCloseToZero";
    case Errc::NonIntegerResult: return "NonIntegerResult";
    case Errc::NoSignChange: return "NoSignChange";
    case Errc::NonpositiveEntry: return "NonpositiveEntry";
    case Errc::IterationStalled: return "IterationStalled";
    case Errc::WindowMismatch: return "WindowMismatch";
    case Errc::BoundaryTouchesChain: return "BoundaryTouchesChain";
    case Errc::UsageError: return "UsageError";
  }
  return "Unknown";
}

/// Usage-type errors (bad input) as opposed to numerical failures.
constexpr bool is_validation_error(Errc e) {
  switch (e) {
    case Errc::NonpositiveRadius:
    case Errc::NonpositiveSide:
    case Errc::NonpositiveLength:
    case Errc::BelowLengthThreshold:
    case Errc::IsometricCirclesOverlap:
    case Errc::TriangleConditionViolated:
    case Errc::CapExceeded:
    case Errc::NotClosed:
    case Errc::WrongKind:
    case Errc::OrderExceedsDatabase:
    case Errc::ConvergenceRegionViolated:
    case Errc::NonpositiveEntry:
    case Errc::WindowMismatch:
    case Errc::BoundaryTouchesChain:
    case Errc::UsageError:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace zetachain
