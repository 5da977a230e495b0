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

// The per-corpus collection of rendered regions.
//
// A store holds, for every page, the DOM tree of regions captured from the
// rendered page. Each region has a rectangle, a text-offset interval over the
// page's document text, and (for innermost text nodes only) the text itself.
// The document text of a page is the concatenation of all stored texts in
// text_start order; stored texts must tile [0, L) without gaps or overlaps.
//
// Stores are built once through StoreBuilder (or LoadStore) and are immutable
// afterwards, so they can be shared by concurrent readers.

#ifndef VQE_REGION_STORE_H_
#define VQE_REGION_STORE_H_

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vqe/region.h"

namespace vqe {

// Global ordinal of a region in a store. Ordinals are page-major and, within
// a page, follow region-id order.
using RegionRef = std::uint32_t;

// One row of the Regions table, as read from or written to JSONL.
struct StoredRegionRecord {
  std::string page_id;
  RegionId region_id;
  Region region;
  std::int64_t text_start = 0;
  std::int64_t text_end = 0;
  std::string text;
  std::string html_tag;
  std::optional<RegionId> minimal_region;
  std::optional<RegionId> maximal_region;

  friend bool operator==(const StoredRegionRecord &,
                         const StoredRegionRecord &) = default;
};

struct StoredRegion {
  RegionId id;
  Region rect;
  TextSpan text_span;
  std::string text;
  std::string html_tag;
  std::uint32_t page = 0;
  // Page-local indices; -1 for the root's parent.
  std::int32_t parent = -1;
  std::int32_t minimal = 0;
  std::int32_t maximal = 0;
  // Page-local index one past the last descendant (preorder).
  std::int32_t subtree_end = 0;
};

struct Page {
  std::string id;
  RegionRef first = 0;
  std::uint32_t count = 0;
  std::string document;

  RegionRef end() const { return first + count; }
};

struct Dictionary {
  std::string name;
  std::vector<std::string> phrases;

  friend bool operator==(const Dictionary &, const Dictionary &) = default;
};

class RegionStore {
 public:
  RegionStore() = default;

  std::span<const Page> pages() const { return pages_; }
  std::span<const StoredRegion> regions() const { return regions_; }
  std::size_t size() const { return regions_.size(); }

  const Page *FindPage(std::string_view page_id) const;
  std::optional<std::uint32_t> PageIndex(std::string_view page_id) const;
  // Throws kNotFound.
  const Page &GetPage(std::string_view page_id) const;

  std::optional<RegionRef> Find(std::string_view page_id,
                                const RegionId &id) const;
  std::optional<RegionRef> Find(std::uint32_t page, const RegionId &id) const;

  const StoredRegion &region(RegionRef ref) const { return regions_[ref]; }
  const Page &page_of(RegionRef ref) const { return pages_[regions_[ref].page]; }

  RegionRef MinimalRef(RegionRef ref) const {
    return page_of(ref).first + regions_[ref].minimal;
  }
  RegionRef MaximalRef(RegionRef ref) const {
    return page_of(ref).first + regions_[ref].maximal;
  }

  // Visual span of a stored region: its rectangle and text offsets.
  VisualSpan SpanOf(RegionRef ref) const;

  // Text of [span.begin, span.end) in the page's document, clipped.
  std::string_view DocumentText(std::string_view page_id,
                                const TextSpan &span) const;

  const std::map<std::string, Dictionary, std::less<>> &dictionaries() const {
    return dictionaries_;
  }
  const Dictionary *FindDictionary(std::string_view name) const;
  // Adds or replaces a dictionary. Call before sharing the store.
  void RegisterDictionary(Dictionary dict);

  // Flat records with derived fields filled in, page-major in id order.
  std::vector<StoredRegionRecord> Records() const;

  friend bool operator==(const RegionStore &a, const RegionStore &b);

 private:
  friend class StoreBuilder;

  std::vector<Page> pages_;
  std::vector<StoredRegion> regions_;
  std::unordered_map<std::string, std::uint32_t> page_index_;
  std::map<std::string, Dictionary, std::less<>> dictionaries_;
};

// Collects records and dictionaries, validates, derives minimal/maximal links.
class StoreBuilder {
 public:
  void Add(StoredRegionRecord record);
  void AddDictionary(Dictionary dict);

  // Throws kValidationError naming the offending page/region.
  RegionStore Build() &&;

 private:
  std::vector<StoredRegionRecord> records_;
  std::map<std::string, Dictionary, std::less<>> dictionaries_;
};

// Reads the JSONL store format. Region lines carry the fields page_id,
// region_id, xl, yl, xh, yh, text_start, text_end, text, html_tag and
// optionally minimal_region and maximal_region. Lines of the form
// {"dictionary": NAME, "phrases": [...]} register dictionaries. Throws
// kParseError (with the line number) or kValidationError.
RegionStore LoadStore(std::istream &in);
RegionStore LoadStoreFile(const std::string &path);

// Writes the store back in the same format, derived fields included.
void SaveStore(const RegionStore &store, std::ostream &out);
void SaveStoreFile(const RegionStore &store, const std::string &path);

// One phrase per line; blank lines are skipped.
Dictionary LoadDictionaryFile(const std::string &name, const std::string &path);

struct EffectiveText {
  std::string text;
  TextSpan span;
};

// Stored text if non-empty, else the concatenation of descendant texts in
// text_start order. The span is the region's own offsets.
EffectiveText GetEffectiveText(const RegionStore &store,
                               std::string_view page_id, const RegionId &id);
EffectiveText GetEffectiveText(const RegionStore &store, RegionRef ref);

// Returns a copy of the store with minimal/maximal links recomputed from
// effective text, ignoring any supplied values.
RegionStore DeriveMinMax(const RegionStore &store);

// Innermost store region (longest id, then smallest id) on the page whose
// text interval covers the span.
std::optional<RegionRef> InnermostCovering(const RegionStore &store,
                                           std::uint32_t page,
                                           const TextSpan &span);

}  // namespace vqe

#endif  // VQE_REGION_STORE_H_
