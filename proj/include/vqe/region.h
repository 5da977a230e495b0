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

// Core value types: rectangles, text spans, visual spans, region ids and
// relations, plus the pure geometric primitives over them.

#ifndef VQE_REGION_H_
#define VQE_REGION_H_

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace vqe {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Axis-aligned rectangle in page pixels. y grows downward, x rightward.
// Upper bounds may be kInf for virtual regions only.
struct Region {
  double xl = 0;
  double yl = 0;
  double xh = 0;
  double yh = 0;

  bool IsFinite() const;
  // True when the invariants hold (ordered bounds, finite lower bounds,
  // upper bounds finite or +inf).
  bool IsValid() const;

  friend bool operator==(const Region &, const Region &) = default;
  friend std::partial_ordering operator<=>(const Region &,
                                           const Region &) = default;
};

// Throws kInvalidRegion when the bounds violate the Region invariants.
Region MakeRegion(double xl, double yl, double xh, double yh);

// Half-open character interval [begin, end) over a page's document text.
struct TextSpan {
  std::int64_t begin = 0;
  std::int64_t end = 0;

  std::int64_t length() const { return end - begin; }

  friend bool operator==(const TextSpan &, const TextSpan &) = default;
  friend auto operator<=>(const TextSpan &, const TextSpan &) = default;
};

TextSpan MakeTextSpan(std::int64_t begin, std::int64_t end);

// Path of a DOM node: "1.2.3" is the third child of the second child of
// the root "1". Compares lexicographically by segment, which is document
// (preorder) order.
class RegionId {
 public:
  using Path = boost::container::small_vector<std::uint32_t, 8>;

  RegionId() = default;
  explicit RegionId(std::initializer_list<std::uint32_t> segments);
  explicit RegionId(std::span<const std::uint32_t> segments);

  // Parses the dot-separated form. Throws kInvalidRegionId.
  static RegionId Parse(std::string_view text);
  static std::optional<RegionId> TryParse(std::string_view text);

  const Path &path() const { return path_; }
  std::size_t depth() const { return path_.size(); }
  bool empty() const { return path_.empty(); }
  bool IsRoot() const { return path_.size() == 1; }

  RegionId Parent() const;
  RegionId Child(std::uint32_t ordinal) const;

  std::string ToString() const;

  friend bool operator==(const RegionId &a, const RegionId &b) {
    return a.path_ == b.path_;
  }
  friend std::strong_ordering operator<=>(const RegionId &a,
                                          const RegionId &b);

 private:
  Path path_;
};

std::ostream &operator<<(std::ostream &os, const RegionId &id);

// True iff a's path is a (proper or improper) prefix of b's path.
bool IdIsPrefix(const RegionId &a, const RegionId &b);

// A text span paired with the rectangle that renders it.
struct VisualSpan {
  std::string page_id;
  TextSpan span;
  Region region;
  // Absent for synthesized rectangles (bounding boxes, centroids).
  std::optional<RegionId> source;

  friend bool operator==(const VisualSpan &, const VisualSpan &) = default;
};

// Total order used for canonical sorting of rows.
std::weak_ordering CompareVisualSpans(const VisualSpan &a,
                                      const VisualSpan &b);

std::ostream &operator<<(std::ostream &os, const VisualSpan &v);

using Tuple = std::vector<VisualSpan>;

// Multiset of fixed-width tuples.
class Relation {
 public:
  Relation() : Relation(1) {}
  explicit Relation(std::size_t width);
  explicit Relation(std::vector<std::string> column_names);

  std::size_t width() const { return column_names_.size(); }
  const std::vector<std::string> &column_names() const {
    return column_names_;
  }
  const std::vector<Tuple> &rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  // Throws kWidthMismatch.
  void Add(Tuple row);
  // Convenience for width-1 relations.
  void Add(VisualSpan span);

  // Rows sorted into canonical order, for comparing multisets.
  std::vector<Tuple> SortedRows() const;

 private:
  std::vector<std::string> column_names_;
  std::vector<Tuple> rows_;
};

// Throws kWidthMismatch unless the relation has width 1.
void RequireWidthOne(const Relation &rel, std::string_view op);

double Area(const Region &r);
VisualSpan Centroid(const VisualSpan &v);

}  // namespace vqe

#endif  // VQE_REGION_H_
