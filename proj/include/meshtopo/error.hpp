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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace meshtopo {

enum class ErrorCode {
  kIo,
  kParse,
  kUnsupportedFace,
  kIndex,
  kDomain,
  kDegenerate,
  kPrecondition,
  kDecode,
  kConsistency,
  kMaskEmpty,
  kNumeric,
  kTopology,
  kNoPath,
  kInvalidPath,
  kFraming,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// the C API can map it onto a status value without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

// Rethrows `e` with `context` prepended to the message, keeping the code.
[[noreturn]] inline void rethrow_with_context(const Error& e,
                                              std::string_view context) {
  throw Error(e.code(), std::string(context) + ": " + e.what());
}

}  // namespace meshtopo
