// Copyright 2026 The meshtopo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "meshtopo/error.hpp"

namespace meshtopo {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return "io";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kUnsupportedFace: return "unsupported-face";
    case ErrorCode::kIndex: return "index";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kDecode: return "decode";
    case ErrorCode::kConsistency: return "consistency";
    case ErrorCode::kMaskEmpty: return "mask-empty";
    case ErrorCode::kNumeric: return "numeric";
    case ErrorCode::kTopology: return "topology";
    case ErrorCode::kNoPath: return "no-path";
    case ErrorCode::kInvalidPath: return "invalid-path";
    case ErrorCode::kFraming: return "framing";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
  }
  return "unknown";
}

}  // namespace meshtopo
