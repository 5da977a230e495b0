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

#include "support/oracles.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <regex>

namespace vqe::oracle {

namespace {

const StoredRegionRecord *FindRec(const std::vector<StoredRegionRecord> &recs,
                                  const std::string &page, const RegionId &id) {
  for (const auto &r : recs) {
    if (r.page_id == page && r.region_id == id) return &r;
  }
  return nullptr;
}

bool Inside(const Region &a, const Region &b) {
  return b.xl <= a.xl && a.xh <= b.xh && b.yl <= a.yl && a.yh <= b.yh;
}

bool SpanIn(const TextSpan &a, const TextSpan &b) {
  return b.begin <= a.begin && a.end <= b.end;
}

std::vector<std::string> TokenTexts(const std::string &text) {
  std::vector<std::string> out;
  for (auto &t : Tokens(text)) out.push_back(t.first);
  return out;
}

VisualSpan CoverScan(const RegionStore &store, const std::string &page,
                     TextSpan span) {
  std::optional<RegionRef> best;
  for (RegionRef ref = 0; ref < store.size(); ++ref) {
    const auto &r = store.region(ref);
    if (store.page_of(ref).id != page) continue;
    if (!SpanIn(span, r.text_span)) continue;
    if (!best) {
      best = ref;
      continue;
    }
    const auto &b = store.region(*best);
    if (r.id.depth() > b.id.depth() ||
        (r.id.depth() == b.id.depth() && r.id < b.id)) {
      best = ref;
    }
  }
  if (!best) throw std::runtime_error("oracle: no covering region");
  VisualSpan v = store.SpanOf(*best);
  v.span = span;
  return v;
}

}  // namespace

std::string EffectiveText(const std::vector<StoredRegionRecord> &recs,
                          const std::string &page, const RegionId &id) {
  const auto *self = FindRec(recs, page, id);
  if (self == nullptr) throw std::runtime_error("oracle: no such region");
  if (!self->text.empty()) return self->text;
  std::vector<const StoredRegionRecord *> leaves;
  for (const auto &r : recs) {
    if (r.page_id == page && r.region_id != id && IdIsPrefix(id, r.region_id) &&
        !r.text.empty()) {
      leaves.push_back(&r);
    }
  }
  std::sort(leaves.begin(), leaves.end(), [](auto *a, auto *b) {
    return a->text_start < b->text_start;
  });
  std::string out;
  for (auto *l : leaves) out += l->text;
  return out;
}

std::pair<RegionId, RegionId> MinMax(const std::vector<StoredRegionRecord> &recs,
                                     const std::string &page, const RegionId &id) {
  std::string text = EffectiveText(recs, page, id);
  RegionId minimal = id, maximal = id;
  for (const auto &r : recs) {
    if (r.page_id != page) continue;
    if (EffectiveText(recs, page, r.region_id) != text) continue;
    if (IdIsPrefix(r.region_id, id) && r.region_id.depth() < maximal.depth()) {
      maximal = r.region_id;
    }
    if (IdIsPrefix(id, r.region_id)) {
      if (r.region_id.depth() > minimal.depth() ||
          (r.region_id.depth() == minimal.depth() && r.region_id < minimal)) {
        minimal = r.region_id;
      }
    }
  }
  return {minimal, maximal};
}

std::vector<std::pair<std::string, std::pair<std::int64_t, std::int64_t>>> Tokens(
    const std::string &text) {
  std::vector<std::pair<std::string, std::pair<std::int64_t, std::int64_t>>> out;
  auto alnum = [](unsigned char c) { return c >= 0x80 || std::isalnum(c); };
  std::size_t i = 0;
  while (i < text.size()) {
    if (!alnum(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    std::string tok;
    while (j < text.size() && alnum(static_cast<unsigned char>(text[j]))) {
      tok.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[j]))));
      ++j;
    }
    out.push_back({tok, {static_cast<std::int64_t>(i), static_cast<std::int64_t>(j)}});
    i = j;
  }
  return out;
}

std::vector<RegionRef> PhraseScan(const RegionStore &store, const std::string &phrase) {
  auto want = TokenTexts(phrase);
  std::vector<RegionRef> out;
  for (RegionRef ref = 0; ref < store.size(); ++ref) {
    auto have = TokenTexts(store.region(ref).text);
    for (std::size_t i = 0; i + want.size() <= have.size(); ++i) {
      if (std::equal(want.begin(), want.end(), have.begin() + static_cast<long>(i))) {
        out.push_back(ref);
        break;
      }
    }
  }
  return out;
}

std::vector<RegionRef> RangeScan(const RegionStore &store,
                                 const std::vector<RangeConstraint> &cs) {
  std::vector<RegionRef> out;
  for (RegionRef ref = 0; ref < store.size(); ++ref) {
    const Region &r = store.region(ref).rect;
    bool ok = true;
    for (const auto &c : cs) {
      double k = c.coord == Coord::kXl   ? r.xl
                 : c.coord == Coord::kYl ? r.yl
                 : c.coord == Coord::kXh ? r.xh
                                         : r.yh;
      ok = ok && (c.bound == Bound::kLe ? k <= c.value : k >= c.value);
    }
    if (ok) out.push_back(ref);
  }
  return out;
}

std::vector<VisualSpan> RegexScan(const RegionStore &store, const std::string &page,
                                  const std::string &pattern) {
  std::regex re(pattern, std::regex::ECMAScript | std::regex::icase);
  std::vector<VisualSpan> out;
  const Page &p = store.GetPage(page);
  for (RegionRef ref = p.first; ref < p.end(); ++ref) {
    const auto &r = store.region(ref);
    const std::string &t = r.text;
    auto pos = t.cbegin();
    std::smatch m;
    auto flags = std::regex_constants::match_not_null;
    while (pos != t.cend() && std::regex_search(pos, t.cend(), m, re, flags)) {
      std::int64_t b = m[0].first - t.cbegin(), e = m[0].second - t.cbegin();
      out.push_back(VisualSpan{p.id, {r.text_span.begin + b, r.text_span.begin + e},
                               r.rect, r.id});
      pos = m[0].second;
      flags = std::regex_constants::match_not_null | std::regex_constants::match_prev_avail;
    }
  }
  return out;
}

std::vector<VisualSpan> DictScan(const RegionStore &store, const std::string &page,
                                 const std::vector<std::string> &phrases) {
  std::vector<std::vector<std::string>> distinct;
  for (const auto &ph : phrases) {
    auto t = TokenTexts(ph);
    if (!t.empty() && std::find(distinct.begin(), distinct.end(), t) == distinct.end()) {
      distinct.push_back(t);
    }
  }
  std::vector<VisualSpan> out;
  const Page &p = store.GetPage(page);
  for (RegionRef ref = p.first; ref < p.end(); ++ref) {
    const auto &r = store.region(ref);
    auto toks = Tokens(r.text);
    for (std::size_t i = 0; i < toks.size(); ++i) {
      for (const auto &ph : distinct) {
        if (i + ph.size() > toks.size()) continue;
        bool ok = true;
        for (std::size_t k = 0; k < ph.size(); ++k) ok = ok && toks[i + k].first == ph[k];
        if (ok) {
          out.push_back(VisualSpan{
              p.id,
              {r.text_span.begin + toks[i].second.first,
               r.text_span.begin + toks[i + ph.size() - 1].second.second},
              r.rect, r.id});
        }
      }
    }
  }
  return out;
}

std::vector<VisualSpan> OmegaC(const std::vector<VisualSpan> &rows) {
  // Identical (span, region, page) rows form classes; a class survives as
  // its canonical minimum unless a different row contains it.
  std::vector<VisualSpan> out;
  std::vector<bool> seen(rows.size(), false);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (seen[i]) continue;
    std::vector<std::size_t> cls;
    for (std::size_t j = i; j < rows.size(); ++j) {
      if (rows[j].page_id == rows[i].page_id && rows[j].span == rows[i].span &&
          rows[j].region == rows[i].region) {
        cls.push_back(j);
        seen[j] = true;
      }
    }
    bool contained = false;
    for (const auto &w : rows) {
      if (w.page_id != rows[i].page_id) continue;
      if (w.span == rows[i].span && w.region == rows[i].region) continue;
      if (SpanIn(rows[i].span, w.span) && Inside(rows[i].region, w.region)) {
        contained = true;
      }
    }
    if (contained) continue;
    std::size_t best = cls[0];
    for (auto j : cls) {
      if (CompareVisualSpans(rows[j], rows[best]) < 0) best = j;
    }
    out.push_back(rows[best]);
  }
  return out;
}

std::vector<VisualSpan> OmegaO(const RegionStore &store,
                               const std::vector<VisualSpan> &rows) {
  std::vector<std::size_t> parent(rows.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      if (rows[i].page_id == rows[j].page_id &&
          std::max(rows[i].span.begin, rows[j].span.begin) <
              std::min(rows[i].span.end, rows[j].span.end)) {
        parent[find(i)] = find(j);
      }
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> comps;
  for (std::size_t i = 0; i < rows.size(); ++i) comps[find(i)].push_back(i);
  std::vector<VisualSpan> out;
  for (auto &[root, members] : comps) {
    if (members.size() == 1) {
      out.push_back(rows[members[0]]);
      continue;
    }
    TextSpan merged{rows[members[0]].span.begin, rows[members[0]].span.end};
    for (auto m : members) {
      merged.begin = std::min(merged.begin, rows[m].span.begin);
      merged.end = std::max(merged.end, rows[m].span.end);
    }
    out.push_back(CoverScan(store, rows[members[0]].page_id, merged));
  }
  return out;
}

std::vector<VisualSpan> BetaS(const RegionStore &store,
                              const std::vector<VisualSpan> &rows,
                              std::int64_t max_gap, std::size_t min_count) {
  std::map<std::string, std::vector<VisualSpan>> pages;
  for (const auto &r : rows) pages[r.page_id].push_back(r);
  std::vector<VisualSpan> out;
  for (auto &[page, list] : pages) {
    std::sort(list.begin(), list.end(), [](const VisualSpan &a, const VisualSpan &b) {
      return a.span < b.span;
    });
    std::vector<VisualSpan> run;
    std::int64_t reach = 0;
    auto flush = [&] {
      if (!run.empty() && run.size() >= min_count) {
        out.push_back(CoverScan(store, page, TextSpan{run.front().span.begin, reach}));
      }
      run.clear();
    };
    for (const auto &v : list) {
      if (!run.empty() && v.span.begin - reach > max_gap) flush();
      if (run.empty()) reach = v.span.end;
      run.push_back(v);
      reach = std::max(reach, v.span.end);
    }
    flush();
  }
  return out;
}

std::vector<VisualSpan> BetaV(const RegionStore &store,
                              const std::vector<VisualSpan> &rows, double x_dist,
                              double y_dist, std::size_t min_count) {
  std::vector<RegionRef> qual;
  for (RegionRef t = 0; t < store.size(); ++t) {
    const auto &rt = store.region(t);
    const std::string &page = store.page_of(t).id;
    std::vector<VisualSpan> in;
    for (const auto &v : rows) {
      if (v.page_id == page && Inside(v.region, rt.rect)) in.push_back(v);
    }
    if (in.empty() || in.size() < min_count) continue;
    std::stable_sort(in.begin(), in.end(), [](const VisualSpan &a, const VisualSpan &b) {
      if (a.region.yl != b.region.yl) return a.region.yl < b.region.yl;
      if (a.region.xl != b.region.xl) return a.region.xl < b.region.xl;
      return CompareVisualSpans(a, b) < 0;
    });
    bool ok = true;
    for (std::size_t k = 1; k < in.size(); ++k) {
      double cx1 = (in[k - 1].region.xl + in[k - 1].region.xh) / 2;
      double cx2 = (in[k].region.xl + in[k].region.xh) / 2;
      double cy1 = (in[k - 1].region.yl + in[k - 1].region.yh) / 2;
      double cy2 = (in[k].region.yl + in[k].region.yh) / 2;
      ok = ok && std::fabs(cx1 - cx2) < x_dist && std::fabs(cy1 - cy2) < y_dist;
    }
    if (ok) qual.push_back(t);
  }
  std::vector<VisualSpan> out;
  for (auto t : qual) {
    const auto &rt = store.region(t);
    bool keep = true;
    for (auto u : qual) {
      const auto &ru = store.region(u);
      if (u == t || store.page_of(u).id != store.page_of(t).id) continue;
      if (!Inside(ru.rect, rt.rect) || !SpanIn(ru.text_span, rt.text_span)) continue;
      bool same = ru.rect == rt.rect && ru.text_span == rt.text_span;
      if (!same || ru.id > rt.id) keep = false;
    }
    if (keep) out.push_back(store.SpanOf(t));
  }
  return out;
}

std::vector<std::vector<VisualSpan>> Aligned(const std::vector<VisualSpan> &rows,
                                             const AlignmentSpec &spec,
                                             const RegionStore *store) {
  const bool vertical = spec.axis == Axis::kVertical;
  auto key = [&](const Region &r) {
    double lo = vertical ? r.xl : r.yl, hi = vertical ? r.xh : r.yh;
    return spec.mode == AlignMode::kLeadingEdge ? lo
           : spec.mode == AlignMode::kCenter    ? (lo + hi) / 2
                                                : hi;
  };
  auto lo_of = [&](const Region &r) { return vertical ? r.yl : r.xl; };
  auto hi_of = [&](const Region &r) { return vertical ? r.yh : r.xh; };
  auto cross_lo = [&](const Region &r) { return vertical ? r.xl : r.yl; };
  auto cross_hi = [&](const Region &r) { return vertical ? r.xh : r.yh; };

  // Single-linkage clusters as graph components.
  std::vector<std::size_t> comp(rows.size());
  std::iota(comp.begin(), comp.end(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < rows.size(); ++j) {
        if (std::fabs(key(rows[i].region) - key(rows[j].region)) <= spec.tolerance &&
            comp[j] < comp[i]) {
          comp[i] = comp[j];
          changed = true;
        }
      }
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < rows.size(); ++i) clusters[comp[i]].push_back(i);

  std::vector<std::vector<VisualSpan>> out;
  for (auto &[c, members] : clusters) {
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      const auto &ra = rows[a].region, &rb = rows[b].region;
      if (lo_of(ra) != lo_of(rb)) return lo_of(ra) < lo_of(rb);
      if (hi_of(ra) != hi_of(rb)) return hi_of(ra) < hi_of(rb);
      return CompareVisualSpans(rows[a], rows[b]) < 0;
    });
    std::vector<Region> others;
    if (spec.store_scope && store != nullptr) {
      const Page &p = store->GetPage(rows[members[0]].page_id);
      for (RegionRef ref = p.first; ref < p.end(); ++ref) {
        bool member = false;
        for (auto m : members) {
          member = member || (rows[m].source && *rows[m].source == store->region(ref).id);
        }
        if (!member) others.push_back(store->region(ref).rect);
      }
    } else {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (std::find(members.begin(), members.end(), i) == members.end()) {
          others.push_back(rows[i].region);
        }
      }
    }
    std::vector<VisualSpan> cur;
    auto flush = [&] {
      if (cur.size() >= spec.min_group_size) {
        auto g = cur;
        std::sort(g.begin(), g.end(), [](const VisualSpan &a, const VisualSpan &b) {
          return CompareVisualSpans(a, b) < 0;
        });
        out.push_back(g);
      }
      cur.clear();
    };
    for (std::size_t k = 0; k < members.size(); ++k) {
      const VisualSpan &v = rows[members[k]];
      if (!cur.empty()) {
        const Region &a = cur.back().region, &b = v.region;
        bool cut = lo_of(b) - hi_of(a) > spec.maxdist;
        if (spec.consecutive && hi_of(a) < lo_of(b)) {
          for (const auto &o : others) {
            bool in_gap = lo_of(o) < lo_of(b) && hi_of(o) > hi_of(a);
            bool across = !(cross_lo(o) > std::max(cross_hi(a), cross_hi(b)) ||
                            cross_hi(o) < std::min(cross_lo(a), cross_lo(b)));
            if (in_gap && across && !Inside(a, o) && !Inside(b, o)) cut = true;
          }
        }
        if (cut) flush();
      }
      cur.push_back(v);
    }
    flush();
  }
  return out;
}

std::optional<VisualSpan> SuperRegion(const RegionStore &store,
                                      const std::vector<VisualSpan> &spans) {
  std::optional<RegionRef> best;
  for (RegionRef ref = 0; ref < store.size(); ++ref) {
    if (store.page_of(ref).id != spans.at(0).page_id) continue;
    const auto &r = store.region(ref);
    bool all = true;
    for (const auto &s : spans) all = all && Inside(s.region, r.rect);
    if (!all) continue;
    if (!best) {
      best = ref;
      continue;
    }
    const auto &b = store.region(*best);
    double ar = (r.rect.xh - r.rect.xl) * (r.rect.yh - r.rect.yl);
    double ab = (b.rect.xh - b.rect.xl) * (b.rect.yh - b.rect.yl);
    if (ar < ab || (ar == ab && (r.id.depth() > b.id.depth() ||
                                 (r.id.depth() == b.id.depth() && r.id < b.id)))) {
      best = ref;
    }
  }
  if (!best) return std::nullopt;
  return store.SpanOf(*best);
}

std::vector<VisualSpan> Sorted(std::vector<VisualSpan> rows) {
  std::sort(rows.begin(), rows.end(), [](const VisualSpan &a, const VisualSpan &b) {
    return CompareVisualSpans(a, b) < 0;
  });
  return rows;
}

}  // namespace vqe::oracle
