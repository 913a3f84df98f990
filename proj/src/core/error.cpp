// Copyright 2026 The fedsim Authors.
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

#include "fedsim/error.hpp"

namespace fedsim {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::dimension: return "dimension error";
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::data: return "data error";
    case ErrorKind::format: return "format error";
    case ErrorKind::protocol: return "protocol error";
    case ErrorKind::config: return "config error";
    case ErrorKind::io: return "io error";
    case ErrorKind::numeric: return "numeric error";
  }
  return "error";
}

}  // namespace fedsim
