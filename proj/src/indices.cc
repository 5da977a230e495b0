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

#include "vqe/indices.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <thread>
#include <unordered_map>

#include <boost/crc.hpp>

#include "vqe/error.h"
#include "vqe/tokenizer.h"

namespace vqe {

namespace {

// Little binary helpers; the sidecar is read back on the same platform, so
// native byte order is acceptable and recorded implicitly by the magic.
template <typename T>
void Put(std::ostream &out, const T &v) {
  static_assert(std::is_trivially_copyable_v<T>);
  out.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <typename T>
T Get(std::istream &in) {
  T v{};
  in.read(reinterpret_cast<char *>(&v), sizeof(T));
  if (!in) throw Error(ErrorCode::kIndexMismatch, "truncated index file");
  return v;
}

template <typename T>
void PutVec(std::ostream &out, const std::vector<T> &v) {
  Put<std::uint64_t>(out, v.size());
  if (!v.empty()) {
    out.write(reinterpret_cast<const char *>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(T)));
  }
}

template <typename T>
std::vector<T> GetVec(std::istream &in) {
  auto n = Get<std::uint64_t>(in);
  if (n > (std::uint64_t{1} << 40) / sizeof(T)) {
    throw Error(ErrorCode::kIndexMismatch, "corrupt index section length");
  }
  std::vector<T> v(n);
  if (n > 0) {
    in.read(reinterpret_cast<char *>(v.data()),
            static_cast<std::streamsize>(n * sizeof(T)));
    if (!in) throw Error(ErrorCode::kIndexMismatch, "truncated index file");
  }
  return v;
}

void PutString(std::ostream &out, std::string_view s) {
  Put<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string GetString(std::istream &in) {
  auto n = Get<std::uint64_t>(in);
  if (n > (std::uint64_t{1} << 32)) {
    throw Error(ErrorCode::kIndexMismatch, "corrupt string length");
  }
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw Error(ErrorCode::kIndexMismatch, "truncated index file");
  return s;
}

constexpr char kMagic[8] = {'V', 'Q', 'E', 'I', 'N', 'D', 'E', 'X'};

std::pair<std::size_t, std::size_t> KeyRange(std::span<const double> keys,
                                             const RangeConstraint &c) {
  if (c.bound == Bound::kLe) {
    auto it = std::upper_bound(keys.begin(), keys.end(), c.value);
    return {0, static_cast<std::size_t>(it - keys.begin())};
  }
  auto it = std::lower_bound(keys.begin(), keys.end(), c.value);
  return {static_cast<std::size_t>(it - keys.begin()), keys.size()};
}

}  // namespace

// ---------------------------------------------------------------------------
// TextIndex

TextIndex TextIndex::Build(const RegionStore &store) {
  std::unordered_map<std::string, std::vector<Posting>> lists;
  const auto regions = store.regions();
  for (RegionRef ref = 0; ref < regions.size(); ++ref) {
    const auto &text = regions[ref].text;
    if (text.empty()) continue;
    std::uint32_t pos = 0;
    for (auto &tok : Tokenize(text)) {
      lists[std::move(tok.text)].push_back(Posting{ref, pos++});
    }
  }
  TextIndex index;
  index.terms_.reserve(lists.size());
  for (const auto &kv : lists) index.terms_.push_back(kv.first);
  std::sort(index.terms_.begin(), index.terms_.end());
  index.offsets_.reserve(index.terms_.size() + 1);
  index.offsets_.push_back(0);
  for (const auto &term : index.terms_) {
    auto &list = lists[term];
    index.postings_.insert(index.postings_.end(), list.begin(), list.end());
    index.offsets_.push_back(index.postings_.size());
  }
  return index;
}

std::span<const Posting> TextIndex::Postings(std::string_view token) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), token);
  if (it == terms_.end() || *it != token) return {};
  auto i = static_cast<std::size_t>(it - terms_.begin());
  return std::span<const Posting>(postings_.data() + offsets_[i],
                                  offsets_[i + 1] - offsets_[i]);
}

std::vector<RegionRef> TextIndex::Contains(std::string_view phrase) const {
  auto tokens = TokenTexts(phrase);
  if (tokens.empty()) {
    throw Error(ErrorCode::kEmptyPhrase,
                "phrase '" + std::string(phrase) + "' has no tokens");
  }
  return ContainsTokens(tokens);
}

std::vector<RegionRef> TextIndex::ContainsTokens(
    std::span<const std::string> tokens) const {
  std::vector<RegionRef> out;
  if (tokens.empty()) return out;
  std::vector<std::span<const Posting>> lists;
  std::size_t driver = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    lists.push_back(Postings(tokens[i]));
    if (lists.back().empty()) return out;
    if (lists[i].size() < lists[driver].size()) driver = i;
  }
  for (const auto &p : lists[driver]) {
    if (p.position < driver) continue;
    if (!out.empty() && out.back() == p.ref) continue;
    std::uint32_t start = p.position - static_cast<std::uint32_t>(driver);
    bool ok = true;
    for (std::size_t i = 0; i < lists.size() && ok; ++i) {
      if (i == driver) continue;
      Posting want{p.ref, start + static_cast<std::uint32_t>(i)};
      ok = std::binary_search(lists[i].begin(), lists[i].end(), want);
    }
    if (ok) out.push_back(p.ref);
  }
  return out;
}

std::vector<RegionRef> TextIndex::WithTokenContaining(
    std::string_view fragment) const {
  std::vector<RegionRef> out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].find(fragment) == std::string::npos) continue;
    for (auto k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      out.push_back(postings_[k].ref);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void TextIndex::Write(std::ostream &out) const {
  Put<std::uint64_t>(out, terms_.size());
  for (const auto &t : terms_) PutString(out, t);
  PutVec(out, offsets_);
  PutVec(out, postings_);
}

TextIndex TextIndex::Read(std::istream &in) {
  TextIndex index;
  auto n = Get<std::uint64_t>(in);
  if (n > (std::uint64_t{1} << 32)) {
    throw Error(ErrorCode::kIndexMismatch, "corrupt vocabulary size");
  }
  index.terms_.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) index.terms_.push_back(GetString(in));
  index.offsets_ = GetVec<std::uint64_t>(in);
  index.postings_ = GetVec<Posting>(in);
  if (index.offsets_.size() != n + 1 ||
      index.offsets_.back() != index.postings_.size()) {
    throw Error(ErrorCode::kIndexMismatch, "inconsistent text index section");
  }
  return index;
}

// ---------------------------------------------------------------------------
// RegionIndex

std::string_view CoordName(Coord c) {
  switch (c) {
    case Coord::kXl: return "x_l";
    case Coord::kYl: return "y_l";
    case Coord::kXh: return "x_h";
    case Coord::kYh: return "y_h";
  }
  return "?";
}

double CoordOf(const Region &r, Coord c) {
  switch (c) {
    case Coord::kXl: return r.xl;
    case Coord::kYl: return r.yl;
    case Coord::kXh: return r.xh;
    case Coord::kYh: return r.yh;
  }
  return 0;
}

bool RangeConstraint::Holds(const Region &r) const {
  double k = CoordOf(r, coord);
  return bound == Bound::kLe ? k <= value : k >= value;
}

RegionIndex RegionIndex::Build(const RegionStore &store, bool parallel) {
  RegionIndex index;
  const auto regions = store.regions();
  const std::size_t n = regions.size();
  for (const auto &page : store.pages()) {
    index.page_ranges_.emplace_back(page.first, page.count);
  }

  auto build_coord = [&](int ci) {
    auto c = static_cast<Coord>(ci);
    std::vector<std::pair<double, RegionRef>> entries(n);
    for (RegionRef r = 0; r < n; ++r) {
      entries[r] = {CoordOf(regions[r].rect, c), r};
    }
    // Page slices first: entries are already page-contiguous.
    auto &pk = index.page_keys_[ci];
    auto &pr = index.page_refs_[ci];
    pk.resize(n);
    pr.resize(n);
    for (const auto &[first, count] : index.page_ranges_) {
      std::vector<std::pair<double, RegionRef>> slice(
          entries.begin() + first, entries.begin() + first + count);
      std::sort(slice.begin(), slice.end());
      for (std::size_t i = 0; i < slice.size(); ++i) {
        pk[first + i] = slice[i].first;
        pr[first + i] = slice[i].second;
      }
    }
    std::sort(entries.begin(), entries.end());
    auto &keys = index.keys_[ci];
    auto &refs = index.refs_[ci];
    keys.resize(n);
    refs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      keys[i] = entries[i].first;
      refs[i] = entries[i].second;
    }
    auto &h = index.histograms_[ci];
    if (n > 0) {
      h.lo = keys.front();
      h.hi = keys.back();
      for (double k : keys) {
        int b = h.hi > h.lo
                    ? static_cast<int>((k - h.lo) / (h.hi - h.lo) * kBuckets)
                    : 0;
        ++h.counts[std::clamp(b, 0, kBuckets - 1)];
      }
    }
  };

  if (parallel) {
    std::vector<std::jthread> workers;
    for (int c = 0; c < 4; ++c) workers.emplace_back(build_coord, c);
  } else {
    for (int c = 0; c < 4; ++c) build_coord(c);
  }

  index.rects_.resize(n);
  for (RegionRef r = 0; r < n; ++r) index.rects_[r] = regions[r].rect;
  return index;
}

std::vector<RegionRef> RegionIndex::RangeQuery(
    std::span<const RangeConstraint> cs) const {
  if (cs.empty()) {
    throw Error(ErrorCode::kRuntime, "range query needs at least one constraint");
  }
  std::size_t best = 0;
  std::pair<std::size_t, std::size_t> best_range{0, 0};
  for (std::size_t i = 0; i < cs.size(); ++i) {
    auto ci = static_cast<int>(cs[i].coord);
    auto range = KeyRange(keys_[ci], cs[i]);
    if (i == 0 || range.second - range.first <
                      best_range.second - best_range.first) {
      best = i;
      best_range = range;
    }
  }
  const auto &refs = refs_[static_cast<int>(cs[best].coord)];
  std::vector<RegionRef> out;
  for (auto i = best_range.first; i < best_range.second; ++i) {
    RegionRef r = refs[i];
    bool ok = true;
    for (std::size_t k = 0; k < cs.size() && ok; ++k) {
      if (k != best) ok = cs[k].Holds(rects_[r]);
    }
    if (ok) out.push_back(r);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void RegionIndex::RangeQueryPageInto(std::uint32_t page,
                                     std::span<const RangeConstraint> cs,
                                     std::vector<RegionRef> &out) const {
  const auto [first, count] = page_ranges_[page];
  if (cs.empty()) {
    for (RegionRef r = first; r < first + count; ++r) out.push_back(r);
    return;
  }
  std::size_t best = 0;
  std::pair<std::size_t, std::size_t> best_range{0, 0};
  for (std::size_t i = 0; i < cs.size(); ++i) {
    auto ci = static_cast<int>(cs[i].coord);
    std::span<const double> keys(page_keys_[ci].data() + first, count);
    auto range = KeyRange(keys, cs[i]);
    if (i == 0 || range.second - range.first <
                      best_range.second - best_range.first) {
      best = i;
      best_range = range;
    }
  }
  const RegionRef *refs = page_refs_[static_cast<int>(cs[best].coord)].data() + first;
  for (auto i = best_range.first; i < best_range.second; ++i) {
    RegionRef r = refs[i];
    bool ok = true;
    for (std::size_t k = 0; k < cs.size() && ok; ++k) {
      if (k != best) ok = cs[k].Holds(rects_[r]);
    }
    if (ok) out.push_back(r);
  }
}

std::vector<RegionRef> RegionIndex::RangeQueryPage(
    std::uint32_t page, std::span<const RangeConstraint> cs) const {
  std::vector<RegionRef> out;
  RangeQueryPageInto(page, cs, out);
  std::sort(out.begin(), out.end());
  return out;
}

double RegionIndex::Selectivity(const RangeConstraint &c) const {
  const auto &h = histograms_[static_cast<int>(c.coord)];
  const double n = static_cast<double>(size());
  if (n == 0) return 0;
  // Fraction of keys <= v, interpolating inside the bucket holding v.
  auto below = [&](double v) {
    if (v < h.lo) return 0.0;
    if (v >= h.hi) return 1.0;
    double pos = (v - h.lo) / (h.hi - h.lo) * kBuckets;
    int b = std::clamp(static_cast<int>(pos), 0, kBuckets - 1);
    double acc = 0;
    for (int i = 0; i < b; ++i) acc += static_cast<double>(h.counts[i]);
    acc += static_cast<double>(h.counts[b]) * (pos - b);
    return acc / n;
  };
  if (c.bound == Bound::kLe) return below(c.value);
  if (c.value <= h.lo) return 1.0;
  if (c.value > h.hi) return 0.0;
  return 1.0 - below(c.value);
}

double RegionIndex::Estimate(std::span<const RangeConstraint> cs) const {
  double est = static_cast<double>(size());
  for (const auto &c : cs) est *= Selectivity(c);
  return est;
}

void RegionIndex::Write(std::ostream &out) const {
  Put<std::uint64_t>(out, page_ranges_.size());
  for (const auto &[first, count] : page_ranges_) {
    Put(out, first);
    Put(out, count);
  }
  for (int c = 0; c < 4; ++c) {
    PutVec(out, keys_[c]);
    PutVec(out, refs_[c]);
    PutVec(out, page_keys_[c]);
    PutVec(out, page_refs_[c]);
    Put(out, histograms_[c]);
  }
  PutVec(out, rects_);
}

RegionIndex RegionIndex::Read(std::istream &in) {
  RegionIndex index;
  auto pages = Get<std::uint64_t>(in);
  if (pages > (std::uint64_t{1} << 32)) {
    throw Error(ErrorCode::kIndexMismatch, "corrupt page count");
  }
  for (std::uint64_t i = 0; i < pages; ++i) {
    auto first = Get<RegionRef>(in);
    auto count = Get<std::uint32_t>(in);
    index.page_ranges_.emplace_back(first, count);
  }
  for (int c = 0; c < 4; ++c) {
    index.keys_[c] = GetVec<double>(in);
    index.refs_[c] = GetVec<RegionRef>(in);
    index.page_keys_[c] = GetVec<double>(in);
    index.page_refs_[c] = GetVec<RegionRef>(in);
    index.histograms_[c] = Get<Histogram>(in);
  }
  index.rects_ = GetVec<Region>(in);
  const auto n = index.rects_.size();
  for (int c = 0; c < 4; ++c) {
    if (index.keys_[c].size() != n || index.refs_[c].size() != n ||
        index.page_keys_[c].size() != n || index.page_refs_[c].size() != n) {
      throw Error(ErrorCode::kIndexMismatch, "inconsistent region index section");
    }
  }
  return index;
}

// ---------------------------------------------------------------------------
// Index sets and sidecar files

std::optional<IndexConfig> IndexConfig::Parse(std::string_view name) {
  if (name == "none") return IndexConfig{false, false};
  if (name == "text") return IndexConfig{true, false};
  if (name == "region") return IndexConfig{false, true};
  if (name == "all") return IndexConfig{true, true};
  return std::nullopt;
}

std::string IndexConfig::Name() const {
  if (text && region) return "all";
  if (text) return "text";
  if (region) return "region";
  return "none";
}

IndexSet IndexSet::Build(const RegionStore &store, IndexConfig config) {
  IndexSet set;
  if (config.text) {
    set.text = std::make_shared<const TextIndex>(TextIndex::Build(store));
  }
  if (config.region) {
    set.region = std::make_shared<const RegionIndex>(RegionIndex::Build(store));
  }
  return set;
}

IndexSet IndexSet::Restrict(IndexConfig config) const {
  IndexSet set;
  if (config.text) set.text = text;
  if (config.region) set.region = region;
  return set;
}

std::uint64_t StoreFingerprint(const RegionStore &store) {
  boost::crc_optimal<64, 0x42F0E1EBA9EA3693ULL, ~0ULL, ~0ULL, true, true> crc;
  auto feed = [&](std::string_view s) {
    std::uint64_t n = s.size();
    crc.process_bytes(&n, sizeof(n));
    crc.process_bytes(s.data(), s.size());
  };
  for (const auto &page : store.pages()) {
    feed(page.id);
    for (RegionRef ref = page.first; ref < page.end(); ++ref) {
      const auto &r = store.region(ref);
      feed(r.id.ToString());
      crc.process_bytes(&r.rect, sizeof(r.rect));
      crc.process_bytes(&r.text_span, sizeof(r.text_span));
      feed(r.text);
      feed(r.html_tag);
    }
  }
  return crc.checksum();
}

void WriteIndexFile(const RegionStore &store, const IndexSet &indices,
                    const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out.write(kMagic, sizeof(kMagic));
  Put(out, kIndexFormatVersion);
  Put(out, StoreFingerprint(store));
  Put<std::uint8_t>(out, indices.text ? 1 : 0);
  if (indices.text) indices.text->Write(out);
  Put<std::uint8_t>(out, indices.region ? 1 : 0);
  if (indices.region) indices.region->Write(out);
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

IndexSet ReadIndexFile(const RegionStore &store, const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  char magic[sizeof(kMagic)] = {};
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::kIndexMismatch, "'" + path + "' is not an index file");
  }
  auto version = Get<std::uint32_t>(in);
  if (version != kIndexFormatVersion) {
    throw Error(ErrorCode::kIndexMismatch,
                "index format version " + std::to_string(version) +
                    ", expected " + std::to_string(kIndexFormatVersion));
  }
  if (Get<std::uint64_t>(in) != StoreFingerprint(store)) {
    throw Error(ErrorCode::kIndexMismatch,
                "'" + path + "' was built for a different store");
  }
  IndexSet set;
  if (Get<std::uint8_t>(in) != 0) {
    set.text = std::make_shared<const TextIndex>(TextIndex::Read(in));
  }
  if (Get<std::uint8_t>(in) != 0) {
    set.region = std::make_shared<const RegionIndex>(RegionIndex::Read(in));
  }
  return set;
}

}  // namespace vqe
