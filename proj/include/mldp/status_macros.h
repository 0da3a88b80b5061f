// Copyright 2026 The mldp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MLDP_STATUS_MACROS_H_
#define MLDP_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define MLDP_STATUS_CONCAT_INNER_(a, b) a##b
#define MLDP_STATUS_CONCAT_(a, b) MLDP_STATUS_CONCAT_INNER_(a, b)

#define MLDP_RETURN_IF_ERROR(expr)        \
  do {                                    \
    absl::Status _mldp_status = (expr);   \
    if (!_mldp_status.ok()) {             \
      return _mldp_status;                \
    }                                     \
  } while (false)

#define MLDP_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                \
  if (!statusor.ok()) {                                   \
    return std::move(statusor).status();                  \
  }                                                       \
  lhs = *std::move(statusor)

// Evaluates `rexpr` (an absl::StatusOr<T>), returning its status on error and
// otherwise assigning the value to `lhs`.
#define MLDP_ASSIGN_OR_RETURN(lhs, rexpr) \
  MLDP_ASSIGN_OR_RETURN_IMPL_(            \
      MLDP_STATUS_CONCAT_(_mldp_statusor_, __LINE__), lhs, rexpr)

#endif  // MLDP_STATUS_MACROS_H_
