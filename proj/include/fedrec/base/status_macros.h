// Copyright 2026 The fedrec Authors.
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

#ifndef FEDREC_BASE_STATUS_MACROS_H_
#define FEDREC_BASE_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define FEDREC_RETURN_IF_ERROR(expr)              \
  do {                                            \
    const absl::Status _fedrec_status = (expr);   \
    if (!_fedrec_status.ok()) return _fedrec_status; \
  } while (0)

#define FEDREC_CONCAT_INNER_(a, b) a##b
#define FEDREC_CONCAT_(a, b) FEDREC_CONCAT_INNER_(a, b)

#define FEDREC_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, rexpr) \
  auto tmp = (rexpr);                                  \
  if (!tmp.ok()) return tmp.status();                  \
  lhs = std::move(tmp).value()

// Evaluates `rexpr` (a StatusOr) and either assigns the value to `lhs` or
// returns the error from the enclosing function.
#define FEDREC_ASSIGN_OR_RETURN(lhs, rexpr) \
  FEDREC_ASSIGN_OR_RETURN_IMPL_(            \
      FEDREC_CONCAT_(_fedrec_statusor_, __LINE__), lhs, rexpr)

#endif  // FEDREC_BASE_STATUS_MACROS_H_
