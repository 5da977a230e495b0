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

// Deterministic synthetic corpora for benchmarks and tests.
//
// Every page gets a header band (y < 90), a narrow navigation column of
// vertically stacked links at x_l = 10, and a content area at x >= 520 made
// of tables with aligned columns. Every tenth page (starting with the first)
// carries the system-requirements motif: a "System Requirements" title in
// the header and a table whose "Operating Systems" column lists operating
// systems with a requirements cell to the east of each.

#ifndef VQE_SYNTH_H_
#define VQE_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "vqe/region_store.h"

namespace vqe {

// Generic web-page words; contains none of the motif words.
const std::vector<std::string> &DefaultVocabulary();

// Operating system names used by the motif; registered as dictionary "T".
const std::vector<std::string> &OperatingSystemNames();

// Exactly `regions_per_page` regions on each of `pages` pages. The same
// arguments always produce the same store. Throws kRuntime when a count is
// zero or the vocabulary is empty.
RegionStore SynthCorpus(std::size_t pages, std::size_t regions_per_page,
                        const std::vector<std::string> &vocabulary,
                        std::uint64_t seed);

}  // namespace vqe

#endif  // VQE_SYNTH_H_
