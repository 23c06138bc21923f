// Copyright 2026 The GGT Authors.
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

#include "ggt/error.h"

namespace ggt {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kInfeasibleDegree: return "InfeasibleDegree";
    case ErrorKind::kGenerationExhausted: return "GenerationExhausted";
    case ErrorKind::kDisconnected: return "Disconnected";
    case ErrorKind::kRegulationExhausted: return "RegulationExhausted";
    case ErrorKind::kTooFewChannels: return "TooFewChannels";
    case ErrorKind::kShapeMismatch: return "ShapeMismatch";
    case ErrorKind::kNonFinite: return "NonFinite";
    case ErrorKind::kDivergenceDetected: return "DivergenceDetected";
    case ErrorKind::kEnsembleTooSmall: return "EnsembleTooSmall";
    case ErrorKind::kDegenerateCalibration: return "DegenerateCalibration";
    case ErrorKind::kEmptyEnsemble: return "EmptyEnsemble";
    case ErrorKind::kConfig: return "ConfigError";
    case ErrorKind::kIo: return "IoError";
    case ErrorKind::kFormat: return "FormatError";
  }
  return "Unknown";
}

}  // namespace ggt
