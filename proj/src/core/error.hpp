// Copyright 2026 The tpeas Authors. All Rights Reserved.
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
// =============================================================================

#ifndef TPEAS_CORE_ERROR_HPP
#define TPEAS_CORE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace tpeas {

// Mirrors tpeas_status in the C header; keep the numeric values in sync.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kOutOfDomain = 2,
  kInsufficientHistory = 3,
  kConfig = 4,
  kParse = 5,
  kIo = 6,
  kBlackbox = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace tpeas

#endif  // TPEAS_CORE_ERROR_HPP
