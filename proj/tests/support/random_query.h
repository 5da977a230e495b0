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

// Random VQL for property tests: arbitrary syntactic ASTs, malformed text
// mutations, and well-typed queries over the random stores.

#ifndef VQE_TESTS_SUPPORT_RANDOM_QUERY_H_
#define VQE_TESTS_SUPPORT_RANDOM_QUERY_H_

#include <random>
#include <string>
#include <vector>

#include "vqe/vql.h"

namespace vqe::testing {

// Any AST the grammar can express; not necessarily well typed.
vql::Query RandomAst(std::mt19937_64 &rng);

// A random edit of `text`: deletions, insertions of stray tokens and bytes,
// duplications and truncation.
std::string Mutate(std::mt19937_64 &rng, const std::string &text);

// Well-typed query text for the random stores (dictionaries "T" and "E").
// Covers every source, predicate, function, grouping option, aggregate and
// set operation.
std::string RandomQueryText(std::mt19937_64 &rng);

// The shipped Q1-Q4 fixture queries (file name, text).
std::vector<std::pair<std::string, std::string>> FixtureQueries();

}  // namespace vqe::testing

#endif  // VQE_TESTS_SUPPORT_RANDOM_QUERY_H_
