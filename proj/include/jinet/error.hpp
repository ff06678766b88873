#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jinet {

enum class Errc {
  NotSymmetric,
  NotOrthonormal,
  RankOutOfBounds,
  DimensionMismatch,
  DegenerateModel,
  DegenerateInput,
  RankDeficient,
  LabelOutOfRange,
  ProbabilityOutOfRange,
  NotDivisibleBy4,
  InvalidDesign,
  ZeroMatrix,
  TooFewValues,
  KTooLarge,
  LengthMismatch,
  ParseError,
  NegativeWeight,
  NegativeEntry,
  EmptyGraph,
  NoOverlap,
  ConstantColumn,
  InvalidArgument,
  IoError,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::NotOrthonormal: return "NotOrthonormal";
    case Errc::RankOutOfBounds: return "RankOutOfBounds";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::DegenerateModel: return "DegenerateModel";
    case Errc::DegenerateInput: return "DegenerateInput";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::LabelOutOfRange: return "LabelOutOfRange";
    case Errc::ProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case Errc::NotDivisibleBy4: return "NotDivisibleBy4";
    case Errc::InvalidDesign: return "InvalidDesign";
    case Errc::ZeroMatrix: return "ZeroMatrix";
    case Errc::TooFewValues: return "TooFewValues";
    case Errc::KTooLarge: return "KTooLarge";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::ParseError: return "ParseError";
    case Errc::NegativeWeight: return "NegativeWeight";
    case Errc::NegativeEntry: return "NegativeEntry";
    case Errc::EmptyGraph: return "EmptyGraph";
    case Errc::NoOverlap: return "NoOverlap";
    case Errc::ConstantColumn: return "ConstantColumn";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

/// Errors caused by the caller's input (bad files, bad ranks, bad flags), as
/// opposed to numerical failures discovered while running an estimator.
constexpr bool is_validation_error(Errc code) noexcept {
  switch (code) {
    case Errc::DegenerateModel:
    case Errc::DegenerateInput:
    case Errc::RankDeficient:
    case Errc::ZeroMatrix:
    case Errc::IoError:
      return false;
    default:
      return true;
  }
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace jinet
