// Copyright 2026 The IIB Authors.
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

#ifndef IIB_ERROR_HPP_
#define IIB_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace iib {

enum class ErrorCode {
  kInvalidArgument = 1,
  kOutOfBounds,
  kIo,
  kFormat,
  kFingerprintMismatch,
  kInsufficientData,
  kInternal,
};

// All library failures surface as iib::Error. The code is what the C API
// reports; the message carries the context (offending names, bounds, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace iib

#endif  // IIB_ERROR_HPP_
