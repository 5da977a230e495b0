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

#include "vqe/region.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "vqe/error.h"

namespace vqe {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInfiniteRegion: return "InfiniteRegion";
    case ErrorCode::kInvalidRegion: return "InvalidRegion";
    case ErrorCode::kInvalidRegionId: return "InvalidRegionId";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kPageMismatch: return "PageMismatch";
    case ErrorCode::kBadPattern: return "BadPattern";
    case ErrorCode::kUnknownDictionary: return "UnknownDictionary";
    case ErrorCode::kEmptyPhrase: return "EmptyPhrase";
    case ErrorCode::kSynthesizedRegion: return "SynthesizedRegion";
    case ErrorCode::kWidthMismatch: return "WidthMismatch";
    case ErrorCode::kNoCoveringRegion: return "NoCoveringRegion";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kUnsupportedNode: return "UnsupportedNode";
    case ErrorCode::kIndexMismatch: return "IndexMismatch";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kRuntime: return "Runtime";
  }
  return "Unknown";
}

bool Region::IsFinite() const {
  return std::isfinite(xl) && std::isfinite(yl) && std::isfinite(xh) &&
         std::isfinite(yh);
}

bool Region::IsValid() const {
  auto upper_ok = [](double v) { return std::isfinite(v) || v == kInf; };
  return std::isfinite(xl) && std::isfinite(yl) && upper_ok(xh) &&
         upper_ok(yh) && xl <= xh && yl <= yh;
}

Region MakeRegion(double xl, double yl, double xh, double yh) {
  Region r{xl, yl, xh, yh};
  if (!r.IsValid()) {
    std::ostringstream os;
    os << "bad bounds (" << xl << "," << yl << "," << xh << "," << yh << ")";
    throw Error(ErrorCode::kInvalidRegion, os.str());
  }
  return r;
}

TextSpan MakeTextSpan(std::int64_t begin, std::int64_t end) {
  if (begin < 0 || begin > end) {
    throw Error(ErrorCode::kInvalidRegion,
                "bad text span [" + std::to_string(begin) + "," +
                    std::to_string(end) + ")");
  }
  return TextSpan{begin, end};
}

RegionId::RegionId(std::initializer_list<std::uint32_t> segments)
    : RegionId(std::span<const std::uint32_t>(segments.begin(),
                                              segments.size())) {}

RegionId::RegionId(std::span<const std::uint32_t> segments)
    : path_(segments.begin(), segments.end()) {
  if (path_.empty()) {
    throw Error(ErrorCode::kInvalidRegionId, "empty path");
  }
  for (auto s : path_) {
    if (s == 0) throw Error(ErrorCode::kInvalidRegionId, "segment 0");
  }
}

std::optional<RegionId> RegionId::TryParse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  RegionId id;
  std::size_t pos = 0;
  while (true) {
    std::size_t dot = text.find('.', pos);
    std::string_view seg = text.substr(
        pos, dot == std::string_view::npos ? std::string_view::npos
                                           : dot - pos);
    if (seg.empty()) return std::nullopt;
    for (char c : seg) {
      if (c < '0' || c > '9') return std::nullopt;
    }
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(seg.data(), seg.data() + seg.size(), value);
    if (ec != std::errc() || ptr != seg.data() + seg.size() || value == 0) {
      return std::nullopt;
    }
    id.path_.push_back(value);
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  return id;
}

RegionId RegionId::Parse(std::string_view text) {
  auto id = TryParse(text);
  if (!id) {
    throw Error(ErrorCode::kInvalidRegionId,
                "malformed region id '" + std::string(text) + "'");
  }
  return *id;
}

RegionId RegionId::Parent() const {
  RegionId parent;
  if (path_.size() > 1) parent.path_.assign(path_.begin(), path_.end() - 1);
  return parent;
}

RegionId RegionId::Child(std::uint32_t ordinal) const {
  RegionId child = *this;
  child.path_.push_back(ordinal);
  return child;
}

std::string RegionId::ToString() const {
  std::string out;
  for (std::size_t i = 0; i < path_.size(); ++i) {
    if (i > 0) out.push_back('.');
    out += std::to_string(path_[i]);
  }
  return out;
}

std::strong_ordering operator<=>(const RegionId &a, const RegionId &b) {
  return std::lexicographical_compare_three_way(
      a.path_.begin(), a.path_.end(), b.path_.begin(), b.path_.end());
}

std::ostream &operator<<(std::ostream &os, const RegionId &id) {
  return os << id.ToString();
}

bool IdIsPrefix(const RegionId &a, const RegionId &b) {
  const auto &pa = a.path();
  const auto &pb = b.path();
  if (pa.size() > pb.size()) return false;
  return std::equal(pa.begin(), pa.end(), pb.begin());
}

namespace {

std::weak_ordering CompareDouble(double a, double b) {
  if (a < b) return std::weak_ordering::less;
  if (b < a) return std::weak_ordering::greater;
  return std::weak_ordering::equivalent;
}

}  // namespace

std::weak_ordering CompareVisualSpans(const VisualSpan &a,
                                      const VisualSpan &b) {
  if (auto c = a.page_id <=> b.page_id; c != 0) return c;
  if (auto c = a.span <=> b.span; c != 0) return c;
  for (auto [x, y] : {std::pair{a.region.xl, b.region.xl},
                      std::pair{a.region.yl, b.region.yl},
                      std::pair{a.region.xh, b.region.xh},
                      std::pair{a.region.yh, b.region.yh}}) {
    if (auto c = CompareDouble(x, y); c != 0) return c;
  }
  if (a.source.has_value() != b.source.has_value()) {
    return a.source.has_value() ? std::weak_ordering::greater
                                : std::weak_ordering::less;
  }
  if (a.source) return *a.source <=> *b.source;
  return std::weak_ordering::equivalent;
}

std::ostream &operator<<(std::ostream &os, const VisualSpan &v) {
  os << "{" << v.page_id << " [" << v.span.begin << "," << v.span.end
     << ") (" << v.region.xl << "," << v.region.yl << "," << v.region.xh
     << "," << v.region.yh << ")";
  if (v.source) os << " @" << *v.source;
  return os << "}";
}

Relation::Relation(std::size_t width) {
  if (width == 0) throw Error(ErrorCode::kWidthMismatch, "width must be >= 1");
  if (width == 1) {
    column_names_.push_back("vs");
  } else {
    for (std::size_t i = 0; i < width; ++i) {
      column_names_.push_back("c" + std::to_string(i + 1));
    }
  }
}

Relation::Relation(std::vector<std::string> column_names)
    : column_names_(std::move(column_names)) {
  if (column_names_.empty()) {
    throw Error(ErrorCode::kWidthMismatch, "width must be >= 1");
  }
  auto sorted = column_names_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::kWidthMismatch, "duplicate column name");
  }
}

void Relation::Add(Tuple row) {
  if (row.size() != width()) {
    throw Error(ErrorCode::kWidthMismatch,
                "row of width " + std::to_string(row.size()) +
                    " added to relation of width " + std::to_string(width()));
  }
  rows_.push_back(std::move(row));
}

void Relation::Add(VisualSpan span) {
  Tuple row;
  row.push_back(std::move(span));
  Add(std::move(row));
}

std::vector<Tuple> Relation::SortedRows() const {
  auto rows = rows_;
  std::sort(rows.begin(), rows.end(), [](const Tuple &a, const Tuple &b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      auto c = CompareVisualSpans(a[i], b[i]);
      if (c != 0) return c < 0;
    }
    return false;
  });
  return rows;
}

void RequireWidthOne(const Relation &rel, std::string_view op) {
  if (rel.width() != 1) {
    throw Error(ErrorCode::kWidthMismatch,
                std::string(op) + " needs a width-1 relation, got width " +
                    std::to_string(rel.width()));
  }
}

double Area(const Region &r) {
  if (!r.IsFinite()) {
    throw Error(ErrorCode::kInfiniteRegion, "area of an unbounded region");
  }
  return (r.xh - r.xl) * (r.yh - r.yl);
}

VisualSpan Centroid(const VisualSpan &v) {
  if (!v.region.IsFinite()) {
    throw Error(ErrorCode::kInfiniteRegion, "centroid of an unbounded region");
  }
  double cx = (v.region.xl + v.region.xh) / 2;
  double cy = (v.region.yl + v.region.yh) / 2;
  return VisualSpan{v.page_id, v.span, Region{cx, cy, cx, cy}, std::nullopt};
}

}  // namespace vqe
