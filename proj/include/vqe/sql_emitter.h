// Copyright 2026 The vqe Authors.
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

// Translation of logical plans into one flattened SQL statement over a
// Regions table:
//
//   regions(pageid, regionid, text, x_l, y_l, x_h, y_h,
//           text_start, text_end, minimalregion, maximalregion)
//
// `text` is the stored (leaf) text. The statement relies on four
// user-defined functions:
//
//   contains(text, '"phrase"') = 1   phrase search, as a text index offers
//   MatchesRegex(text, pattern)      regular-expression search
//   MatchesDict(text, dictionary)    dictionary phrase search
//   IsPrefix(a, b)                   region id a is a proper path prefix of b
//
// Extraction predicates therefore select whole regions: a region with two
// regex matches contributes one row, not two.
//
// Operators with no SQL counterpart (consolidation, blocks, alignment
// groups with gap or interposer rules, MinimalSuperRegion, grouped or
// set-valued subqueries) are left to the native engine. Their output is
// referenced as a table native_<k> with the Regions columns plus `members`,
// described in a leading comment, and a warning marks the plan hybrid.

#ifndef VQE_SQL_EMITTER_H_
#define VQE_SQL_EMITTER_H_

#include <string>
#include <vector>

#include "vqe/engine.h"

namespace vqe::sql {

struct EmitOptions {
  // Reject plans that need native operators (UnsupportedNode).
  bool strict = false;
  // Replace literals with `?` and return them in `parameters`.
  bool placeholders = false;
};

struct SqlText {
  std::string statement;
  // SQL literals bound to the `?` placeholders, in statement order.
  std::vector<std::string> parameters;
  std::vector<std::string> warnings;
  bool hybrid = false;
};

SqlText Emit(const engine::LogicalPlan &plan, const EmitOptions &options = {});

// Collapses whitespace runs to one space and trims, for comparisons.
std::string NormalizeWhitespace(std::string_view sql);

}  // namespace vqe::sql

#endif  // VQE_SQL_EMITTER_H_
