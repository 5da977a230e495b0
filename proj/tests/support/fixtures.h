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

#ifndef VQE_TESTS_SUPPORT_FIXTURES_H_
#define VQE_TESTS_SUPPORT_FIXTURES_H_

#include <string>
#include <vector>

#include "vqe/region.h"
#include "vqe/region_store.h"

namespace vqe::testing {

std::string FixturePath(const std::string &relative);
std::string ReadFile(const std::string &path);

// The shipped system-requirements store with dictionary "T" registered
// from fixtures/os.dict.
RegionStore SysreqStore();

struct R {
  const char *id;
  Region rect;
  const char *text;
};

// One page whose leaf texts are laid out in preorder; inner nodes (empty
// text) cover their descendants.
RegionStore PageStore(const std::vector<R> &regions,
                      const std::string &page_id = "p");

VisualSpan Span(const RegionStore &store, const std::string &page_id,
                const std::string &id);
VisualSpan Synth(Region rect, TextSpan span = {0, 0},
                 const std::string &page_id = "p");

// Runs a shell command, returning its exit status and captured stdout.
struct CommandResult {
  int status = 0;
  std::string out;
};
CommandResult RunCommand(const std::string &command);
std::string CliPath();

// A fresh directory under the system temp dir.
std::string TempDir(const std::string &name);

}  // namespace vqe::testing

#endif  // VQE_TESTS_SUPPORT_FIXTURES_H_
