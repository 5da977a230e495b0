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

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "engine_internal.h"

namespace vqe::engine {

namespace {

using Json = nlohmann::ordered_json;

enum FieldMask : unsigned {
  kId = 1,
  kRect = 2,
  kOffsets = 4,
  kText = 8,
};

unsigned MaskOf(vql::Attr attr) {
  switch (attr) {
    case vql::Attr::kVisualSpan: return kId | kRect | kOffsets | kText;
    case vql::Attr::kSpan: return kOffsets | kText;
    case vql::Attr::kRegion: return kId | kRect;
    case vql::Attr::kText: return kText;
  }
  return 0;
}

// Integral coordinates print without a fraction; infinity as "inf".
Json Coordinate(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == std::floor(v) && std::fabs(v) < 9.0e15) return static_cast<std::int64_t>(v);
  return v;
}

std::string CsvNumber(double v) { return internal::FormatNumber(v); }

std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void WriteJsonl(const ResultSet &result, const RegionStore &store, std::ostream &out) {
  for (const auto &row : result.rows) {
    Json j;
    j["page_id"] = row.empty() ? "" : row[0].page_id;
    for (std::size_t c = 0; c < result.columns.size() && c < row.size(); ++c) {
      const VisualSpan &v = row[c];
      unsigned mask = MaskOf(result.columns[c].attr);
      Json cell = Json::object();
      if ((mask & kId) && v.source) cell["region_id"] = v.source->ToString();
      if (mask & kRect) {
        cell["xl"] = Coordinate(v.region.xl);
        cell["yl"] = Coordinate(v.region.yl);
        cell["xh"] = Coordinate(v.region.xh);
        cell["yh"] = Coordinate(v.region.yh);
      }
      if (mask & kOffsets) {
        cell["begin"] = v.span.begin;
        cell["end"] = v.span.end;
      }
      if (mask & kText) cell["text"] = std::string(store.DocumentText(v.page_id, v.span));
      j[result.columns[c].name] = std::move(cell);
    }
    out << j.dump(-1, ' ', false, Json::error_handler_t::replace) << '\n';
  }
}

void WriteCsv(const ResultSet &result, const RegionStore &store, std::ostream &out) {
  std::vector<std::string> header = {"page_id"};
  for (const auto &col : result.columns) {
    unsigned mask = MaskOf(col.attr);
    if (mask & kId) header.push_back(col.name + ".region_id");
    if (mask & kRect) {
      for (const char *f : {"xl", "yl", "xh", "yh"}) header.push_back(col.name + "." + f);
    }
    if (mask & kOffsets) {
      header.push_back(col.name + ".begin");
      header.push_back(col.name + ".end");
    }
    if (mask & kText) header.push_back(col.name + ".text");
  }
  auto write = [&](const std::vector<std::string> &fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      out << CsvField(fields[i]);
    }
    out << "\r\n";
  };
  write(header);
  for (const auto &row : result.rows) {
    std::vector<std::string> fields = {row.empty() ? "" : row[0].page_id};
    for (std::size_t c = 0; c < result.columns.size() && c < row.size(); ++c) {
      const VisualSpan &v = row[c];
      unsigned mask = MaskOf(result.columns[c].attr);
      if (mask & kId) fields.push_back(v.source ? v.source->ToString() : "");
      if (mask & kRect) {
        for (double x : {v.region.xl, v.region.yl, v.region.xh, v.region.yh}) {
          fields.push_back(CsvNumber(x));
        }
      }
      if (mask & kOffsets) {
        fields.push_back(std::to_string(v.span.begin));
        fields.push_back(std::to_string(v.span.end));
      }
      if (mask & kText) fields.emplace_back(store.DocumentText(v.page_id, v.span));
    }
    write(fields);
  }
}

}  // namespace vqe::engine
