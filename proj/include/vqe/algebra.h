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

// The visual span algebra: extraction, predicates, consolidation, blocks,
// alignment grouping and region aggregation.
//
// Operators that take a whole relation (consolidation and blocks) work page
// by page; rows on different pages never interact. Binary predicates and
// the grouping/aggregation operators require a single page and throw
// kPageMismatch otherwise.

#ifndef VQE_ALGEBRA_H_
#define VQE_ALGEBRA_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vqe/region.h"
#include "vqe/region_store.h"

namespace vqe {

// ---------------------------------------------------------------------------
// Span extraction

// Case-insensitive regular expression, matched per stored text.
class CompiledRegex {
 public:
  // Throws kBadPattern.
  explicit CompiledRegex(std::string_view pattern);
  ~CompiledRegex();
  CompiledRegex(CompiledRegex &&) noexcept;
  CompiledRegex &operator=(CompiledRegex &&) noexcept;

  // Leftmost, non-overlapping, non-empty matches as local [begin, end).
  void FindAll(std::string_view text,
               std::vector<std::pair<std::int64_t, std::int64_t>> &out) const;
  bool Search(std::string_view text) const;

  const std::string &pattern() const { return pattern_; }

 private:
  struct Impl;
  std::string pattern_;
  std::unique_ptr<Impl> impl_;
};

// Dictionary phrases tokenized once; matches whole-token runs.
class CompiledDictionary {
 public:
  explicit CompiledDictionary(const Dictionary &dict);

  // Every occurrence of every distinct phrase as local [begin, end), ordered
  // by start token then phrase.
  void FindAll(std::string_view text,
               std::vector<std::pair<std::int64_t, std::int64_t>> &out) const;
  bool Search(std::string_view text) const;

  // Distinct non-empty token sequences.
  const std::vector<std::vector<std::string>> &phrases() const {
    return phrases_;
  }

 private:
  std::vector<std::vector<std::string>> phrases_;
};

// Contiguous case-folded token match of a phrase inside a text.
class CompiledPhrase {
 public:
  // Throws kEmptyPhrase.
  explicit CompiledPhrase(std::string_view phrase);
  bool Search(std::string_view text) const;
  const std::vector<std::string> &tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
};

// R(d): every stored region of the page. Throws kNotFound.
Relation AllSpans(const RegionStore &store, std::string_view page_id);
// Throws kBadPattern, kNotFound.
Relation RegexExtract(const RegionStore &store, std::string_view page_id,
                      std::string_view pattern);
// Throws kUnknownDictionary, kNotFound.
Relation DictExtract(const RegionStore &store, std::string_view page_id,
                     std::string_view dictionary);

// The same extractions restricted to the given regions (ascending refs of
// one page), appending matches to `out` in ref order.
void RegexExtractRefs(const RegionStore &store, const CompiledRegex &re,
                      std::span<const RegionRef> refs, std::vector<VisualSpan> &out);
void DictExtractRefs(const RegionStore &store, const CompiledDictionary &dict,
                     std::span<const RegionRef> refs, std::vector<VisualSpan> &out);

// ---------------------------------------------------------------------------
// Predicates

enum class Direction { kNorth, kSouth, kEast, kWest };

// Axis rule with inclusive inequalities; strict additionally requires a's
// perpendicular extent to lie within b's.
bool Directional(Direction dir, bool strict, const Region &a, const Region &b);
bool Directional(Direction dir, bool strict, const VisualSpan &a,
                 const VisualSpan &b);

enum class Topo { kContains, kTouches, kIntersects };

// kContains: a lies inside b.
bool TopoHolds(Topo kind, const Region &a, const Region &b);
bool TopoHolds(Topo kind, const VisualSpan &a, const VisualSpan &b);

enum class SpanRelation { kPrecedesWithin, kOverlaps, kWithin, kEquals };

// kPrecedesWithin: a ends before b starts with at most d characters between.
// kWithin: a is strictly contained in b. Negative d throws kRuntime.
bool TextSpanHolds(SpanRelation kind, const TextSpan &a, const TextSpan &b,
                   std::int64_t d = 0);

// Throws kPageMismatch when the pages differ.
void RequireSamePage(const VisualSpan &a, const VisualSpan &b);

// ---------------------------------------------------------------------------
// Tree navigation. Both throw kSynthesizedRegion for inputs without a
// source region and kNotFound if the source is not in the store.

Relation Ancestors(const RegionStore &store, const VisualSpan &v);
Relation Descendants(const RegionStore &store, const VisualSpan &v);

enum class MinMax { kMinimal, kMaximal };
VisualSpan MinMaxRegion(const RegionStore &store, const VisualSpan &v,
                        MinMax which);

// ---------------------------------------------------------------------------
// Span aggregation

// Drops rows whose region and span both lie inside another row's. Of a set
// of identical (span, region) rows, the first in canonical order survives.
Relation ConsolidateContainment(const Relation &rel);
std::vector<VisualSpan> ConsolidateContainment(std::vector<VisualSpan> rows);

// Merges connected components of text-overlapping rows; components of one
// row pass through unchanged. Throws kNoCoveringRegion.
Relation ConsolidateOverlap(const RegionStore &store, const Relation &rel);
std::vector<VisualSpan> ConsolidateOverlap(const RegionStore &store,
                                           std::vector<VisualSpan> rows);

// Runs of rows (by begin, then end) whose gap to the furthest end seen so
// far is at most max_gap; runs of at least min_count rows become one span
// over the innermost covering store region. Throws kNoCoveringRegion.
Relation BlockText(const RegionStore &store, const Relation &rel,
                   std::int64_t max_gap, std::size_t min_count);
std::vector<VisualSpan> BlockText(const RegionStore &store,
                                  std::vector<VisualSpan> rows,
                                  std::int64_t max_gap, std::size_t min_count);

// Minimal store regions holding at least min_count rows that, ordered by
// (y_l, x_l), have consecutive centroid distances below x_dist and y_dist.
Relation BlockRegion(const RegionStore &store, const Relation &rel,
                     double x_dist, double y_dist, std::size_t min_count);
std::vector<VisualSpan> BlockRegion(const RegionStore &store,
                                    std::vector<VisualSpan> rows, double x_dist,
                                    double y_dist, std::size_t min_count);

// ---------------------------------------------------------------------------
// Alignment grouping

enum class Axis { kHorizontal, kVertical };
enum class AlignMode { kLeadingEdge, kCenter, kTrailingEdge };

struct AlignmentSpec {
  // Vertical alignment stacks rows in a column: keys come from x.
  Axis axis = Axis::kVertical;
  AlignMode mode = AlignMode::kLeadingEdge;
  double tolerance = 0;
  bool consecutive = false;
  double maxdist = kInf;
  std::size_t min_group_size = 2;
  // With consecutive, look for interposers among all store regions of the
  // page instead of the input rows only.
  bool store_scope = false;

  friend bool operator==(const AlignmentSpec &, const AlignmentSpec &) = default;
};

struct Group {
  // Minimal bounding region of the members (synthesized).
  VisualSpan bounds;
  // Ordered along the stacking axis.
  std::vector<VisualSpan> members;
};

// Throws kPageMismatch for mixed pages, kRuntime for an invalid spec.
// `store` is required when spec.store_scope is set.
std::vector<Group> AlignedGroups(std::span<const VisualSpan> rows,
                                 const AlignmentSpec &spec,
                                 const RegionStore *store = nullptr);
// The groups' bounding spans as a width-1 relation.
Relation AlignedGroupsRelation(const Relation &rel, const AlignmentSpec &spec,
                               const RegionStore *store = nullptr);

// Alignment key of a rectangle under the given axis and mode.
double AlignmentKey(const Region &r, Axis axis, AlignMode mode);

// ---------------------------------------------------------------------------
// Region aggregation

// Smallest-area store region containing every input rectangle (ties: deeper
// id, then smaller id). Throws kEmptyInput, kPageMismatch,
// kNoCoveringRegion.
VisualSpan MinimalSuperRegion(const RegionStore &store,
                              std::span<const VisualSpan> spans);

// Synthesized min/max hull. Throws kEmptyInput, kPageMismatch.
VisualSpan MinimalBoundingRegion(std::span<const VisualSpan> spans);

}  // namespace vqe

#endif  // VQE_ALGEBRA_H_
