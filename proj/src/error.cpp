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

#include "saff/error.hpp"

namespace saff {

const char* error_tag(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Io: return "E_IO";
    case ErrorCode::BadMagic: return "E_BAD_MAGIC";
    case ErrorCode::Truncated: return "E_TRUNCATED";
    case ErrorCode::DimOverflow: return "E_DIM_OVERFLOW";
    case ErrorCode::NonFinite: return "E_NONFINITE";
    case ErrorCode::Format: return "E_FORMAT";
    case ErrorCode::Shape: return "E_SHAPE";
    case ErrorCode::InvalidArgument: return "E_INVALID_ARG";
    case ErrorCode::Unmatched: return "E_UNMATCHED";
    case ErrorCode::Empty: return "E_EMPTY";
    case ErrorCode::Internal: return "E_INTERNAL";
  }
  return "E_UNKNOWN";
}

}  // namespace saff
