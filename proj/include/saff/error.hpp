// Copyright 2026 The SAFF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
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

namespace saff {

// Error categories surfaced through the C API as status codes. The numeric
// values are part of the ABI (see saff.h); append only.
enum class ErrorCode : int {
  Io = 1,
  BadMagic = 2,
  Truncated = 3,
  DimOverflow = 4,
  NonFinite = 5,
  Format = 6,
  Shape = 7,
  InvalidArgument = 8,
  Unmatched = 9,
  Empty = 10,
  Internal = 11,
};

/// Short machine-readable tag for an error code, e.g. "E_IO".
const char* error_tag(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace saff
