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

// Secondary access paths over an immutable RegionStore: an inverted index
// on stored texts with phrase containment, and sorted coordinate arrays for
// range constraints on region bounds.

#ifndef VQE_INDICES_H_
#define VQE_INDICES_H_

#include <array>
#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vqe/region_store.h"

namespace vqe {

struct Posting {
  RegionRef ref = 0;
  std::uint32_t position = 0;

  friend bool operator==(const Posting &, const Posting &) = default;
  friend auto operator<=>(const Posting &, const Posting &) = default;
};

class TextIndex {
 public:
  static TextIndex Build(const RegionStore &store);

  // Regions whose stored-text tokens contain the phrase's tokens as a
  // contiguous run. Sorted ascending. Throws kEmptyPhrase.
  std::vector<RegionRef> Contains(std::string_view phrase) const;

  // Same for an already tokenized phrase (non-empty).
  std::vector<RegionRef> ContainsTokens(std::span<const std::string> tokens) const;

  // Regions with at least one token having `fragment` (already folded) as a
  // substring. Sorted ascending.
  std::vector<RegionRef> WithTokenContaining(std::string_view fragment) const;

  // Postings for a folded token, or empty.
  std::span<const Posting> Postings(std::string_view token) const;

  std::size_t vocabulary_size() const { return terms_.size(); }
  std::size_t posting_count() const { return postings_.size(); }

  void Write(std::ostream &out) const;
  static TextIndex Read(std::istream &in);

  friend bool operator==(const TextIndex &, const TextIndex &) = default;

 private:
  std::vector<std::string> terms_;         // sorted
  std::vector<std::uint64_t> offsets_;     // terms_.size() + 1 entries
  std::vector<Posting> postings_;
};

enum class Coord : std::uint8_t { kXl, kYl, kXh, kYh };
enum class Bound : std::uint8_t { kLe, kGe };

std::string_view CoordName(Coord c);
double CoordOf(const Region &r, Coord c);

// coord <= value (kLe) or coord >= value (kGe).
struct RangeConstraint {
  Coord coord = Coord::kXl;
  Bound bound = Bound::kLe;
  double value = 0;

  bool Holds(const Region &r) const;
  friend bool operator==(const RangeConstraint &, const RangeConstraint &) = default;
};

class RegionIndex {
 public:
  static constexpr int kBuckets = 64;

  // The four coordinate sorts run on separate threads when `parallel`.
  static RegionIndex Build(const RegionStore &store, bool parallel = true);

  // Refs satisfying every constraint, sorted ascending. At least one
  // constraint is required.
  std::vector<RegionRef> RangeQuery(std::span<const RangeConstraint> cs) const;

  // Same, restricted to one page.
  std::vector<RegionRef> RangeQueryPage(std::uint32_t page,
                                        std::span<const RangeConstraint> cs) const;
  // Appends to `out` without sorting; for inner loops.
  void RangeQueryPageInto(std::uint32_t page,
                          std::span<const RangeConstraint> cs,
                          std::vector<RegionRef> &out) const;

  // Histogram estimate of the fraction of regions satisfying c.
  double Selectivity(const RangeConstraint &c) const;
  // Estimated number of regions satisfying all of cs (independence).
  double Estimate(std::span<const RangeConstraint> cs) const;

  std::size_t size() const { return keys_[0].size(); }

  void Write(std::ostream &out) const;
  static RegionIndex Read(std::istream &in);

  friend bool operator==(const RegionIndex &, const RegionIndex &) = default;

 private:
  struct Histogram {
    double lo = 0;
    double hi = 0;
    std::array<std::uint64_t, kBuckets> counts{};
    friend bool operator==(const Histogram &, const Histogram &) = default;
  };

  // Global arrays: keys_[c][i] is the key of refs_[c][i], ascending.
  std::array<std::vector<double>, 4> keys_;
  std::array<std::vector<RegionRef>, 4> refs_;
  // Page-sliced arrays: within [page.first, page.end) the refs of that
  // page sorted by key.
  std::array<std::vector<double>, 4> page_keys_;
  std::array<std::vector<RegionRef>, 4> page_refs_;
  std::vector<std::pair<RegionRef, std::uint32_t>> page_ranges_;
  std::array<Histogram, 4> histograms_;
  // Copy of every rectangle by ref, for residual constraint checks.
  std::vector<Region> rects_;
};

// Which index classes are available to the optimizer.
struct IndexConfig {
  bool text = false;
  bool region = false;

  static IndexConfig None() { return {}; }
  static IndexConfig All() { return {true, true}; }
  // Accepts none, text, region, all.
  static std::optional<IndexConfig> Parse(std::string_view name);
  std::string Name() const;
};

struct IndexSet {
  std::shared_ptr<const TextIndex> text;
  std::shared_ptr<const RegionIndex> region;

  static IndexSet Build(const RegionStore &store, IndexConfig config);
  // Keeps only the classes enabled in config.
  IndexSet Restrict(IndexConfig config) const;
};

// Stable fingerprint of a store's content, recorded in sidecar files.
std::uint64_t StoreFingerprint(const RegionStore &store);

// Sidecar format: magic, format version, store fingerprint, then the
// present index sections. Reading a file whose version or fingerprint does
// not match throws kIndexMismatch.
inline constexpr std::uint32_t kIndexFormatVersion = 1;
void WriteIndexFile(const RegionStore &store, const IndexSet &indices,
                    const std::string &path);
IndexSet ReadIndexFile(const RegionStore &store, const std::string &path);

}  // namespace vqe

#endif  // VQE_INDICES_H_
