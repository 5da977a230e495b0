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

#include "vqe/algebra.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include <boost/regex.hpp>

#include "vqe/error.h"
#include "vqe/tokenizer.h"

namespace vqe {

namespace {

using Matches = std::vector<std::pair<std::int64_t, std::int64_t>>;

bool CanonicalLess(const VisualSpan &a, const VisualSpan &b) {
  return CompareVisualSpans(a, b) < 0;
}

bool SpanInside(const TextSpan &inner, const TextSpan &outer) {
  return outer.begin <= inner.begin && inner.end <= outer.end;
}

std::uint32_t PageOf(const RegionStore &store, std::string_view page_id) {
  auto page = store.PageIndex(page_id);
  if (!page) {
    throw Error(ErrorCode::kNotFound, "no page '" + std::string(page_id) + "'");
  }
  return *page;
}

// Applies fn to each page's rows (as indices into rows), pages in order.
template <typename Fn>
void ForEachPage(const std::vector<VisualSpan> &rows, Fn fn) {
  std::map<std::string_view, std::vector<std::size_t>> by_page;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    by_page[rows[i].page_id].push_back(i);
  }
  for (auto &[page, idx] : by_page) fn(page, idx);
}

VisualSpan Covering(const RegionStore &store, std::string_view page_id,
                    const TextSpan &span) {
  auto ref = InnermostCovering(store, PageOf(store, page_id), span);
  if (!ref) {
    throw Error(ErrorCode::kNoCoveringRegion,
                "no region on page '" + std::string(page_id) + "' covers [" +
                    std::to_string(span.begin) + "," + std::to_string(span.end) +
                    ")");
  }
  VisualSpan out = store.SpanOf(*ref);
  out.span = span;
  return out;
}

std::vector<VisualSpan> Column(const Relation &rel) {
  std::vector<VisualSpan> rows;
  rows.reserve(rel.size());
  for (const auto &t : rel.rows()) rows.push_back(t[0]);
  return rows;
}

Relation ToRelation(std::vector<VisualSpan> rows) {
  Relation out(1);
  for (auto &v : rows) out.Add(std::move(v));
  return out;
}

const RegionId &SourceOf(const VisualSpan &v, std::string_view op) {
  if (!v.source) {
    throw Error(ErrorCode::kSynthesizedRegion,
                std::string(op) + " needs a span with a source region");
  }
  return *v.source;
}

RegionRef RefOf(const RegionStore &store, const VisualSpan &v,
                std::string_view op) {
  const RegionId &id = SourceOf(v, op);
  auto ref = store.Find(v.page_id, id);
  if (!ref) {
    throw Error(ErrorCode::kNotFound, "no region " + id.ToString() +
                                          " on page '" + v.page_id + "'");
  }
  return *ref;
}

}  // namespace

// ---------------------------------------------------------------------------
// Extraction

struct CompiledRegex::Impl {
  boost::regex re;
};

CompiledRegex::CompiledRegex(std::string_view pattern)
    : pattern_(pattern), impl_(std::make_unique<Impl>()) {
  try {
    impl_->re.assign(pattern_.begin(), pattern_.end(),
                     boost::regex::perl | boost::regex::icase);
  } catch (const boost::regex_error &e) {
    throw Error(ErrorCode::kBadPattern,
                "'" + pattern_ + "': " + std::string(e.what()));
  }
}

CompiledRegex::~CompiledRegex() = default;
CompiledRegex::CompiledRegex(CompiledRegex &&) noexcept = default;
CompiledRegex &CompiledRegex::operator=(CompiledRegex &&) noexcept = default;

void CompiledRegex::FindAll(std::string_view text, Matches &out) const {
  boost::cregex_iterator it(text.data(), text.data() + text.size(), impl_->re,
                            boost::match_not_null);
  for (; it != boost::cregex_iterator(); ++it) {
    const auto &m = (*it)[0];
    out.emplace_back(m.first - text.data(), m.second - text.data());
  }
}

bool CompiledRegex::Search(std::string_view text) const {
  return boost::regex_search(text.data(), text.data() + text.size(), impl_->re,
                             boost::match_not_null);
}

CompiledDictionary::CompiledDictionary(const Dictionary &dict) {
  for (const auto &phrase : dict.phrases) {
    auto tokens = TokenTexts(phrase);
    if (tokens.empty()) continue;
    if (std::find(phrases_.begin(), phrases_.end(), tokens) == phrases_.end()) {
      phrases_.push_back(std::move(tokens));
    }
  }
}

void CompiledDictionary::FindAll(std::string_view text, Matches &out) const {
  if (phrases_.empty()) return;
  auto tokens = Tokenize(text);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (const auto &phrase : phrases_) {
      if (i + phrase.size() > tokens.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < phrase.size() && ok; ++k) {
        ok = tokens[i + k].text == phrase[k];
      }
      if (ok) out.emplace_back(tokens[i].begin, tokens[i + phrase.size() - 1].end);
    }
  }
}

bool CompiledDictionary::Search(std::string_view text) const {
  Matches m;
  FindAll(text, m);
  return !m.empty();
}

CompiledPhrase::CompiledPhrase(std::string_view phrase)
    : tokens_(TokenTexts(phrase)) {
  if (tokens_.empty()) {
    throw Error(ErrorCode::kEmptyPhrase,
                "phrase '" + std::string(phrase) + "' has no tokens");
  }
}

bool CompiledPhrase::Search(std::string_view text) const {
  auto tokens = TokenTexts(text);
  if (tokens.size() < tokens_.size()) return false;
  auto it = std::search(tokens.begin(), tokens.end(), tokens_.begin(),
                        tokens_.end());
  return it != tokens.end();
}

Relation AllSpans(const RegionStore &store, std::string_view page_id) {
  const Page &page = store.pages()[PageOf(store, page_id)];
  Relation out(1);
  for (RegionRef ref = page.first; ref < page.end(); ++ref) {
    out.Add(store.SpanOf(ref));
  }
  return out;
}

namespace {

template <typename Matcher>
void ExtractRef(const RegionStore &store, const Matcher &matcher, RegionRef ref,
                Matches &matches, std::vector<VisualSpan> &out) {
  const auto &r = store.region(ref);
  if (r.text.empty()) return;
  matches.clear();
  matcher.FindAll(r.text, matches);
  for (auto [b, e] : matches) {
    out.push_back(VisualSpan{store.page_of(ref).id,
                             TextSpan{r.text_span.begin + b, r.text_span.begin + e},
                             r.rect, r.id});
  }
}

template <typename Matcher>
Relation Extract(const RegionStore &store, std::string_view page_id,
                 const Matcher &matcher) {
  const Page &page = store.pages()[PageOf(store, page_id)];
  Relation out(1);
  Matches matches;
  std::vector<VisualSpan> spans;
  for (RegionRef ref = page.first; ref < page.end(); ++ref) {
    ExtractRef(store, matcher, ref, matches, spans);
  }
  for (auto &v : spans) out.Add(std::move(v));
  return out;
}

}  // namespace

Relation RegexExtract(const RegionStore &store, std::string_view page_id,
                      std::string_view pattern) {
  CompiledRegex re(pattern);
  return Extract(store, page_id, re);
}

Relation DictExtract(const RegionStore &store, std::string_view page_id,
                     std::string_view dictionary) {
  const Dictionary *dict = store.FindDictionary(dictionary);
  if (dict == nullptr) {
    throw Error(ErrorCode::kUnknownDictionary,
                "dictionary '" + std::string(dictionary) + "' is not registered");
  }
  CompiledDictionary compiled(*dict);
  return Extract(store, page_id, compiled);
}

void RegexExtractRefs(const RegionStore &store, const CompiledRegex &re,
                      std::span<const RegionRef> refs, std::vector<VisualSpan> &out) {
  Matches matches;
  for (RegionRef ref : refs) ExtractRef(store, re, ref, matches, out);
}

void DictExtractRefs(const RegionStore &store, const CompiledDictionary &dict,
                     std::span<const RegionRef> refs, std::vector<VisualSpan> &out) {
  Matches matches;
  for (RegionRef ref : refs) ExtractRef(store, dict, ref, matches, out);
}

// ---------------------------------------------------------------------------
// Predicates

bool Directional(Direction dir, bool strict, const Region &a, const Region &b) {
  switch (dir) {
    case Direction::kNorth:
      return a.yh <= b.yl && (!strict || (a.xl >= b.xl && a.xh <= b.xh));
    case Direction::kSouth:
      return a.yl >= b.yh && (!strict || (a.xl >= b.xl && a.xh <= b.xh));
    case Direction::kEast:
      return a.xl >= b.xh && (!strict || (a.yl >= b.yl && a.yh <= b.yh));
    case Direction::kWest:
      return a.xh <= b.xl && (!strict || (a.yl >= b.yl && a.yh <= b.yh));
  }
  return false;
}

void RequireSamePage(const VisualSpan &a, const VisualSpan &b) {
  if (a.page_id != b.page_id) {
    throw Error(ErrorCode::kPageMismatch,
                "spans on pages '" + a.page_id + "' and '" + b.page_id + "'");
  }
}

bool Directional(Direction dir, bool strict, const VisualSpan &a,
                 const VisualSpan &b) {
  RequireSamePage(a, b);
  return Directional(dir, strict, a.region, b.region);
}

bool TopoHolds(Topo kind, const Region &a, const Region &b) {
  switch (kind) {
    case Topo::kContains:
      return b.xl <= a.xl && a.xh <= b.xh && b.yl <= a.yl && a.yh <= b.yh;
    case Topo::kIntersects:
      return a.xl <= b.xh && b.xl <= a.xh && a.yl <= b.yh && b.yl <= a.yh;
    case Topo::kTouches: {
      if (!TopoHolds(Topo::kIntersects, a, b)) return false;
      // Interiors overlap iff both axis overlaps have positive length.
      bool x_open = a.xl < b.xh && b.xl < a.xh;
      bool y_open = a.yl < b.yh && b.yl < a.yh;
      return !(x_open && y_open);
    }
  }
  return false;
}

bool TopoHolds(Topo kind, const VisualSpan &a, const VisualSpan &b) {
  RequireSamePage(a, b);
  return TopoHolds(kind, a.region, b.region);
}

bool TextSpanHolds(SpanRelation kind, const TextSpan &a, const TextSpan &b,
                   std::int64_t d) {
  switch (kind) {
    case SpanRelation::kPrecedesWithin:
      if (d < 0) throw Error(ErrorCode::kRuntime, "negative distance");
      return a.end <= b.begin && b.begin - a.end <= d;
    case SpanRelation::kOverlaps:
      return a.begin < b.end && b.begin < a.end;
    case SpanRelation::kWithin:
      return SpanInside(a, b) && a != b;
    case SpanRelation::kEquals:
      return a == b;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Tree navigation

Relation Ancestors(const RegionStore &store, const VisualSpan &v) {
  RegionRef ref = RefOf(store, v, "Ancestors");
  const Page &page = store.page_of(ref);
  std::vector<VisualSpan> chain;
  for (auto a = store.region(ref).parent; a >= 0;
       a = store.region(page.first + a).parent) {
    chain.push_back(store.SpanOf(page.first + a));
  }
  std::reverse(chain.begin(), chain.end());
  return ToRelation(std::move(chain));
}

Relation Descendants(const RegionStore &store, const VisualSpan &v) {
  RegionRef ref = RefOf(store, v, "Descendants");
  const Page &page = store.page_of(ref);
  Relation out(1);
  for (RegionRef d = ref + 1; d < page.first + store.region(ref).subtree_end; ++d) {
    out.Add(store.SpanOf(d));
  }
  return out;
}

VisualSpan MinMaxRegion(const RegionStore &store, const VisualSpan &v,
                        MinMax which) {
  RegionRef ref = RefOf(store, v, which == MinMax::kMinimal ? "MinimalRegion"
                                                            : "MaximalRegion");
  return store.SpanOf(which == MinMax::kMinimal ? store.MinimalRef(ref)
                                                : store.MaximalRef(ref));
}

// ---------------------------------------------------------------------------
// Consolidation and blocks

std::vector<VisualSpan> ConsolidateContainment(std::vector<VisualSpan> rows) {
  std::vector<bool> drop(rows.size(), false);
  ForEachPage(rows, [&](std::string_view, const std::vector<std::size_t> &idx) {
    for (auto u : idx) {
      for (auto w : idx) {
        if (u == w) continue;
        const auto &ru = rows[u];
        const auto &rw = rows[w];
        if (!SpanInside(ru.span, rw.span) ||
            !TopoHolds(Topo::kContains, ru.region, rw.region)) {
          continue;
        }
        bool mutual = ru.span == rw.span && ru.region == rw.region;
        if (!mutual) {
          drop[u] = true;
          break;
        }
        auto c = CompareVisualSpans(rw, ru);
        if (c < 0 || (c == 0 && w < u)) {
          drop[u] = true;
          break;
        }
      }
    }
  });
  std::vector<VisualSpan> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!drop[i]) out.push_back(std::move(rows[i]));
  }
  return out;
}

Relation ConsolidateContainment(const Relation &rel) {
  RequireWidthOne(rel, "ConsolidateContainment");
  return ToRelation(ConsolidateContainment(Column(rel)));
}

std::vector<VisualSpan> ConsolidateOverlap(const RegionStore &store,
                                           std::vector<VisualSpan> rows) {
  std::vector<VisualSpan> out;
  ForEachPage(rows, [&](std::string_view page_id,
                        std::vector<std::size_t> idx) {
    // Empty spans share no offset with anything and stay as they are.
    std::vector<std::size_t> sweep;
    for (auto i : idx) {
      if (rows[i].span.length() == 0) {
        out.push_back(rows[i]);
      } else {
        sweep.push_back(i);
      }
    }
    std::sort(sweep.begin(), sweep.end(), [&](std::size_t a, std::size_t b) {
      if (rows[a].span != rows[b].span) return rows[a].span < rows[b].span;
      return a < b;
    });
    std::size_t i = 0;
    while (i < sweep.size()) {
      std::size_t j = i + 1;
      std::int64_t end = rows[sweep[i]].span.end;
      while (j < sweep.size() && rows[sweep[j]].span.begin < end) {
        end = std::max(end, rows[sweep[j]].span.end);
        ++j;
      }
      if (j - i == 1) {
        out.push_back(rows[sweep[i]]);
      } else {
        out.push_back(
            Covering(store, page_id, TextSpan{rows[sweep[i]].span.begin, end}));
      }
      i = j;
    }
  });
  return out;
}

Relation ConsolidateOverlap(const RegionStore &store, const Relation &rel) {
  RequireWidthOne(rel, "ConsolidateOverlap");
  return ToRelation(ConsolidateOverlap(store, Column(rel)));
}

std::vector<VisualSpan> BlockText(const RegionStore &store,
                                  std::vector<VisualSpan> rows,
                                  std::int64_t max_gap, std::size_t min_count) {
  if (max_gap < 0) throw Error(ErrorCode::kRuntime, "negative block gap");
  if (min_count == 0) throw Error(ErrorCode::kRuntime, "block min_count must be >= 1");
  std::vector<VisualSpan> out;
  ForEachPage(rows, [&](std::string_view page_id,
                        std::vector<std::size_t> idx) {
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (rows[a].span != rows[b].span) return rows[a].span < rows[b].span;
      return a < b;
    });
    std::size_t i = 0;
    while (i < idx.size()) {
      std::size_t j = i + 1;
      std::int64_t end = rows[idx[i]].span.end;
      while (j < idx.size() && rows[idx[j]].span.begin - end <= max_gap) {
        end = std::max(end, rows[idx[j]].span.end);
        ++j;
      }
      if (j - i >= min_count) {
        out.push_back(
            Covering(store, page_id, TextSpan{rows[idx[i]].span.begin, end}));
      }
      i = j;
    }
  });
  return out;
}

Relation BlockText(const RegionStore &store, const Relation &rel,
                   std::int64_t max_gap, std::size_t min_count) {
  RequireWidthOne(rel, "BlockText");
  return ToRelation(BlockText(store, Column(rel), max_gap, min_count));
}

std::vector<VisualSpan> BlockRegion(const RegionStore &store,
                                    std::vector<VisualSpan> rows, double x_dist,
                                    double y_dist, std::size_t min_count) {
  if (min_count == 0) throw Error(ErrorCode::kRuntime, "block min_count must be >= 1");
  std::vector<VisualSpan> out;
  ForEachPage(rows, [&](std::string_view page_id,
                        const std::vector<std::size_t> &idx) {
    const Page &page = store.pages()[PageOf(store, page_id)];
    std::vector<RegionRef> qualifying;
    std::vector<std::size_t> members;
    for (RegionRef t = page.first; t < page.end(); ++t) {
      const Region &rect = store.region(t).rect;
      members.clear();
      for (auto i : idx) {
        if (TopoHolds(Topo::kContains, rows[i].region, rect)) members.push_back(i);
      }
      if (members.size() < min_count || members.empty()) continue;
      std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
        const auto &ra = rows[a].region;
        const auto &rb = rows[b].region;
        if (ra.yl != rb.yl) return ra.yl < rb.yl;
        if (ra.xl != rb.xl) return ra.xl < rb.xl;
        return CanonicalLess(rows[a], rows[b]);
      });
      bool ok = true;
      for (std::size_t k = 1; k < members.size() && ok; ++k) {
        const auto &p = rows[members[k - 1]].region;
        const auto &q = rows[members[k]].region;
        double dx = std::fabs((p.xl + p.xh) / 2 - (q.xl + q.xh) / 2);
        double dy = std::fabs((p.yl + p.yh) / 2 - (q.yl + q.yh) / 2);
        ok = dx < x_dist && dy < y_dist;
      }
      if (ok) qualifying.push_back(t);
    }
    // Keep only minimal qualifiers; of identical ones, the deepest.
    for (auto t : qualifying) {
      const auto &rt = store.region(t);
      bool minimal = true;
      for (auto u : qualifying) {
        if (u == t) continue;
        const auto &ru = store.region(u);
        if (!TopoHolds(Topo::kContains, ru.rect, rt.rect) ||
            !SpanInside(ru.text_span, rt.text_span)) {
          continue;
        }
        bool identical = ru.rect == rt.rect && ru.text_span == rt.text_span;
        if (!identical || u > t) {
          minimal = false;
          break;
        }
      }
      if (minimal) out.push_back(store.SpanOf(t));
    }
  });
  return out;
}

Relation BlockRegion(const RegionStore &store, const Relation &rel,
                     double x_dist, double y_dist, std::size_t min_count) {
  RequireWidthOne(rel, "BlockRegion");
  return ToRelation(BlockRegion(store, Column(rel), x_dist, y_dist, min_count));
}

// ---------------------------------------------------------------------------
// Alignment

double AlignmentKey(const Region &r, Axis axis, AlignMode mode) {
  double lo = axis == Axis::kVertical ? r.xl : r.yl;
  double hi = axis == Axis::kVertical ? r.xh : r.yh;
  switch (mode) {
    case AlignMode::kLeadingEdge: return lo;
    case AlignMode::kCenter: return (lo + hi) / 2;
    case AlignMode::kTrailingEdge: return hi;
  }
  return lo;
}

namespace {

// Extent along the stacking axis (y for vertical alignment) and across it.
struct Extent {
  double lo, hi;
};
Extent Along(const Region &r, Axis axis) {
  return axis == Axis::kVertical ? Extent{r.yl, r.yh} : Extent{r.xl, r.xh};
}
Extent Across(const Region &r, Axis axis) {
  return axis == Axis::kVertical ? Extent{r.xl, r.xh} : Extent{r.yl, r.yh};
}

// True if r lies (partly) in the open gap between a and b along the axis,
// within their combined cross extent, without containing a or b.
bool Interposes(const Region &r, const Region &a, const Region &b, Axis axis) {
  Extent ga = Along(a, axis), gb = Along(b, axis);
  if (!(ga.hi < gb.lo)) return false;
  Extent rr = Along(r, axis);
  if (!(rr.lo < gb.lo && rr.hi > ga.hi)) return false;
  Extent ca = Across(a, axis), cb = Across(b, axis), cr = Across(r, axis);
  double lo = std::min(ca.lo, cb.lo), hi = std::max(ca.hi, cb.hi);
  if (cr.lo > hi || cr.hi < lo) return false;
  return !TopoHolds(Topo::kContains, a, r) && !TopoHolds(Topo::kContains, b, r);
}

}  // namespace

std::vector<Group> AlignedGroups(std::span<const VisualSpan> rows,
                                 const AlignmentSpec &spec,
                                 const RegionStore *store) {
  if (!(spec.tolerance >= 0) || !(spec.maxdist >= 0) || spec.min_group_size < 2) {
    throw Error(ErrorCode::kRuntime,
                "alignment needs tolerance >= 0, maxdist >= 0, min_size >= 2");
  }
  std::vector<Group> groups;
  if (rows.empty()) return groups;
  for (const auto &r : rows) RequireSamePage(rows[0], r);
  if (spec.consecutive && spec.store_scope && store == nullptr) {
    throw Error(ErrorCode::kRuntime, "store-scope alignment needs a store");
  }

  std::vector<double> key(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    key[i] = AlignmentKey(rows[i].region, spec.axis, spec.mode);
  }
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (key[a] != key[b]) return key[a] < key[b];
    return CanonicalLess(rows[a], rows[b]);
  });

  std::vector<Region> outsiders;
  std::vector<bool> in_cluster(rows.size(), false);
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && key[order[j]] - key[order[j - 1]] <= spec.tolerance) {
      ++j;
    }
    std::vector<std::size_t> cluster(order.begin() + i, order.begin() + j);
    std::sort(cluster.begin(), cluster.end(), [&](std::size_t a, std::size_t b) {
      Extent ea = Along(rows[a].region, spec.axis);
      Extent eb = Along(rows[b].region, spec.axis);
      if (ea.lo != eb.lo) return ea.lo < eb.lo;
      if (ea.hi != eb.hi) return ea.hi < eb.hi;
      return CanonicalLess(rows[a], rows[b]);
    });

    if (spec.consecutive) {
      outsiders.clear();
      for (auto c : cluster) in_cluster[c] = true;
      if (spec.store_scope) {
        if (auto page = store->PageIndex(rows[0].page_id)) {
          const Page &p = store->pages()[*page];
          for (RegionRef ref = p.first; ref < p.end(); ++ref) {
            const auto &sr = store->region(ref);
            bool member = std::any_of(cluster.begin(), cluster.end(), [&](std::size_t c) {
              return rows[c].source && *rows[c].source == sr.id;
            });
            if (!member) outsiders.push_back(sr.rect);
          }
        }
      } else {
        for (std::size_t k = 0; k < rows.size(); ++k) {
          if (!in_cluster[k]) outsiders.push_back(rows[k].region);
        }
      }
      for (auto c : cluster) in_cluster[c] = false;
    }

    auto emit = [&](std::size_t from, std::size_t to) {
      if (to - from < spec.min_group_size) return;
      Group g;
      for (auto k = from; k < to; ++k) g.members.push_back(rows[cluster[k]]);
      g.bounds = MinimalBoundingRegion(g.members);
      groups.push_back(std::move(g));
    };
    std::size_t start = 0;
    for (std::size_t k = 1; k < cluster.size(); ++k) {
      const Region &prev = rows[cluster[k - 1]].region;
      const Region &next = rows[cluster[k]].region;
      bool split = Along(next, spec.axis).lo - Along(prev, spec.axis).hi > spec.maxdist;
      if (!split && spec.consecutive) {
        split = std::any_of(outsiders.begin(), outsiders.end(), [&](const Region &o) {
          return Interposes(o, prev, next, spec.axis);
        });
      }
      if (split) {
        emit(start, k);
        start = k;
      }
    }
    emit(start, cluster.size());
    i = j;
  }
  return groups;
}

Relation AlignedGroupsRelation(const Relation &rel, const AlignmentSpec &spec,
                               const RegionStore *store) {
  RequireWidthOne(rel, "AlignedGroups");
  auto rows = Column(rel);
  Relation out(1);
  for (auto &g : AlignedGroups(rows, spec, store)) out.Add(std::move(g.bounds));
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation

VisualSpan MinimalBoundingRegion(std::span<const VisualSpan> spans) {
  if (spans.empty()) {
    throw Error(ErrorCode::kEmptyInput, "MinimalBoundingRegion of an empty set");
  }
  VisualSpan out{spans[0].page_id, spans[0].span, spans[0].region, std::nullopt};
  for (const auto &v : spans) {
    RequireSamePage(spans[0], v);
    out.region.xl = std::min(out.region.xl, v.region.xl);
    out.region.yl = std::min(out.region.yl, v.region.yl);
    out.region.xh = std::max(out.region.xh, v.region.xh);
    out.region.yh = std::max(out.region.yh, v.region.yh);
    out.span.begin = std::min(out.span.begin, v.span.begin);
    out.span.end = std::max(out.span.end, v.span.end);
  }
  return out;
}

VisualSpan MinimalSuperRegion(const RegionStore &store,
                              std::span<const VisualSpan> spans) {
  if (spans.empty()) {
    throw Error(ErrorCode::kEmptyInput, "MinimalSuperRegion of an empty set");
  }
  for (const auto &v : spans) RequireSamePage(spans[0], v);
  auto page_no = store.PageIndex(spans[0].page_id);
  std::optional<RegionRef> best;
  double best_area = 0;
  if (page_no) {
    const Page &page = store.pages()[*page_no];
    for (RegionRef ref = page.first; ref < page.end(); ++ref) {
      const auto &r = store.region(ref);
      bool all = std::all_of(spans.begin(), spans.end(), [&](const VisualSpan &v) {
        return TopoHolds(Topo::kContains, v.region, r.rect);
      });
      if (!all) continue;
      double area = Area(r.rect);
      // Refs ascend in id order, so only a strictly better key replaces.
      if (!best || area < best_area ||
          (area == best_area && r.id.depth() > store.region(*best).id.depth())) {
        best = ref;
        best_area = area;
      }
    }
  }
  if (!best) {
    throw Error(ErrorCode::kNoCoveringRegion,
                "no store region on page '" + spans[0].page_id +
                    "' contains all spans");
  }
  return store.SpanOf(*best);
}

}  // namespace vqe
