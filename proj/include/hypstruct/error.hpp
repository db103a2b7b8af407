// Copyright 2026 The hypstruct Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace hypstruct {

enum class ErrorCode {
  NonPositiveImaginary,
  DegenerateMatrix,
  AsymptoticOrCrossing,
  NotAnosov,
  UniverseOverflow,
  EmptySet,
  BallOverflow,
  NotHomomorphism,
  UnsupportedCase,
  HypothesisFailed,
  NoFitWithinCap,
  DefectClaimViolated,
  NotFixed,
  NotConverged,
  PowerNotInSubgroup,
  NotHomogeneous,
  MissingProjection,
  ResolutionTooCoarse,
  DisconnectedInput,
  CalibrationFailed,
  SaturationFailure,
  DisjointnessViolation,
  TooClose,
  TooFewDomains,
  ScenarioUnavailable,
  WitnessFailed,
  PatternNotFound,
  ConfigError,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonPositiveImaginary: return "NonPositiveImaginary";
    case ErrorCode::DegenerateMatrix: return "DegenerateMatrix";
    case ErrorCode::AsymptoticOrCrossing: return "AsymptoticOrCrossing";
    case ErrorCode::NotAnosov: return "NotAnosov";
    case ErrorCode::UniverseOverflow: return "UniverseOverflow";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::BallOverflow: return "BallOverflow";
    case ErrorCode::NotHomomorphism: return "NotHomomorphism";
    case ErrorCode::UnsupportedCase: return "UnsupportedCase";
    case ErrorCode::HypothesisFailed: return "HypothesisFailed";
    case ErrorCode::NoFitWithinCap: return "NoFitWithinCap";
    case ErrorCode::DefectClaimViolated: return "DefectClaimViolated";
    case ErrorCode::NotFixed: return "NotFixed";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::PowerNotInSubgroup: return "PowerNotInSubgroup";
    case ErrorCode::NotHomogeneous: return "NotHomogeneous";
    case ErrorCode::MissingProjection: return "MissingProjection";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::DisconnectedInput: return "DisconnectedInput";
    case ErrorCode::CalibrationFailed: return "CalibrationFailed";
    case ErrorCode::SaturationFailure: return "SaturationFailure";
    case ErrorCode::DisjointnessViolation: return "DisjointnessViolation";
    case ErrorCode::TooClose: return "TooClose";
    case ErrorCode::TooFewDomains: return "TooFewDomains";
    case ErrorCode::ScenarioUnavailable: return "ScenarioUnavailable";
    case ErrorCode::WitnessFailed: return "WitnessFailed";
    case ErrorCode::PatternNotFound: return "PatternNotFound";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hypstruct
