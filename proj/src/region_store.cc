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

#include "vqe/region_store.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vqe/error.h"

namespace vqe {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void Invalid(std::string_view page, const RegionId *id,
                          const std::string &reason) {
  std::string where = "page '" + std::string(page) + "'";
  if (id != nullptr) where += " region " + id->ToString();
  throw Error(ErrorCode::kValidationError, where + ": " + reason);
}

void ValidateRecord(const StoredRegionRecord &r) {
  if (r.page_id.empty()) Invalid(r.page_id, &r.region_id, "empty page_id");
  if (!r.region.IsFinite() || !r.region.IsValid()) {
    Invalid(r.page_id, &r.region_id, "region must be finite with ordered bounds");
  }
  if (r.text_start < 0 || r.text_start > r.text_end) {
    Invalid(r.page_id, &r.region_id,
            "text offsets out of order (" + std::to_string(r.text_start) +
                "," + std::to_string(r.text_end) + ")");
  }
  if (!r.text.empty() &&
      r.text_end - r.text_start != static_cast<std::int64_t>(r.text.size())) {
    Invalid(r.page_id, &r.region_id,
            "length mismatch: text has " + std::to_string(r.text.size()) +
                " bytes but offsets span " +
                std::to_string(r.text_end - r.text_start));
  }
}

// Effective texts of every region of one page, indexed page-locally.
std::vector<std::string> PageEffectiveTexts(
    std::span<const StoredRegion> regs) {
  std::vector<std::string> out(regs.size());
  std::vector<std::int32_t> leaves;
  for (std::size_t i = 0; i < regs.size(); ++i) {
    if (!regs[i].text.empty()) {
      out[i] = regs[i].text;
      continue;
    }
    leaves.clear();
    for (auto j = static_cast<std::int32_t>(i) + 1; j < regs[i].subtree_end;
         ++j) {
      if (!regs[j].text.empty()) leaves.push_back(j);
    }
    std::sort(leaves.begin(), leaves.end(), [&](std::int32_t a, std::int32_t b) {
      return regs[a].text_span.begin < regs[b].text_span.begin;
    });
    for (auto j : leaves) out[i] += regs[j].text;
  }
  return out;
}

// Fills minimal/maximal for one page from effective text equality.
void DerivePageMinMax(std::span<StoredRegion> regs,
                      const std::vector<bool> &keep_min,
                      const std::vector<bool> &keep_max) {
  auto texts = PageEffectiveTexts(regs);
  for (std::size_t i = 0; i < regs.size(); ++i) {
    if (!keep_max[i]) {
      auto best = static_cast<std::int32_t>(i);
      for (auto a = regs[i].parent; a >= 0; a = regs[a].parent) {
        if (texts[a] == texts[i]) best = a;
      }
      regs[i].maximal = best;
    }
    if (!keep_min[i]) {
      auto best = static_cast<std::int32_t>(i);
      std::size_t best_depth = regs[i].id.depth();
      for (auto d = static_cast<std::int32_t>(i) + 1; d < regs[i].subtree_end;
           ++d) {
        // Preorder visits equal-depth candidates in id order, so strict
        // comparison keeps the lexicographically smallest.
        if (regs[d].id.depth() > best_depth && texts[d] == texts[i]) {
          best = d;
          best_depth = regs[d].id.depth();
        }
      }
      regs[i].minimal = best;
    }
  }
}

ordered_json RecordToJson(const StoredRegionRecord &r) {
  ordered_json j;
  j["page_id"] = r.page_id;
  j["region_id"] = r.region_id.ToString();
  j["xl"] = r.region.xl;
  j["yl"] = r.region.yl;
  j["xh"] = r.region.xh;
  j["yh"] = r.region.yh;
  j["text_start"] = r.text_start;
  j["text_end"] = r.text_end;
  j["text"] = r.text;
  j["html_tag"] = r.html_tag;
  if (r.minimal_region) j["minimal_region"] = r.minimal_region->ToString();
  if (r.maximal_region) j["maximal_region"] = r.maximal_region->ToString();
  return j;
}

[[noreturn]] void LineError(std::size_t line, const std::string &reason) {
  throw Error(ErrorCode::kParseError,
              "line " + std::to_string(line) + ": " + reason);
}

const ordered_json &Field(const ordered_json &j, const char *name,
                          std::size_t line) {
  auto it = j.find(name);
  if (it == j.end()) LineError(line, std::string("missing field '") + name + "'");
  return *it;
}

double NumberField(const ordered_json &j, const char *name, std::size_t line) {
  const auto &v = Field(j, name, line);
  if (!v.is_number()) LineError(line, std::string("field '") + name + "' must be a number");
  return v.get<double>();
}

std::int64_t IntField(const ordered_json &j, const char *name,
                      std::size_t line) {
  const auto &v = Field(j, name, line);
  if (!v.is_number_integer()) {
    LineError(line, std::string("field '") + name + "' must be an integer");
  }
  return v.get<std::int64_t>();
}

std::string StringField(const ordered_json &j, const char *name,
                        std::size_t line) {
  const auto &v = Field(j, name, line);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  LineError(line, std::string("field '") + name + "' must be a string");
}

RegionId IdField(const ordered_json &j, const char *name, std::size_t line) {
  auto text = StringField(j, name, line);
  auto id = RegionId::TryParse(text);
  if (!id) LineError(line, "malformed region id '" + text + "' in field '" + name + "'");
  return *id;
}

}  // namespace

const Page *RegionStore::FindPage(std::string_view page_id) const {
  auto it = page_index_.find(std::string(page_id));
  return it == page_index_.end() ? nullptr : &pages_[it->second];
}

std::optional<std::uint32_t> RegionStore::PageIndex(
    std::string_view page_id) const {
  auto it = page_index_.find(std::string(page_id));
  if (it == page_index_.end()) return std::nullopt;
  return it->second;
}

const Page &RegionStore::GetPage(std::string_view page_id) const {
  const Page *p = FindPage(page_id);
  if (p == nullptr) {
    throw Error(ErrorCode::kNotFound, "no page '" + std::string(page_id) + "'");
  }
  return *p;
}

std::optional<RegionRef> RegionStore::Find(std::uint32_t page,
                                           const RegionId &id) const {
  const Page &p = pages_[page];
  auto begin = regions_.begin() + p.first;
  auto end = begin + p.count;
  auto it = std::lower_bound(
      begin, end, id,
      [](const StoredRegion &r, const RegionId &key) { return r.id < key; });
  if (it == end || it->id != id) return std::nullopt;
  return static_cast<RegionRef>(it - regions_.begin());
}

std::optional<RegionRef> RegionStore::Find(std::string_view page_id,
                                           const RegionId &id) const {
  auto page = PageIndex(page_id);
  if (!page) return std::nullopt;
  return Find(*page, id);
}

VisualSpan RegionStore::SpanOf(RegionRef ref) const {
  const auto &r = regions_[ref];
  return VisualSpan{pages_[r.page].id, r.text_span, r.rect, r.id};
}

std::string_view RegionStore::DocumentText(std::string_view page_id,
                                           const TextSpan &span) const {
  const Page *p = FindPage(page_id);
  if (p == nullptr) return {};
  std::string_view doc = p->document;
  auto begin = static_cast<std::size_t>(std::max<std::int64_t>(span.begin, 0));
  auto end = static_cast<std::size_t>(std::max<std::int64_t>(span.end, 0));
  begin = std::min(begin, doc.size());
  end = std::clamp(end, begin, doc.size());
  return doc.substr(begin, end - begin);
}

const Dictionary *RegionStore::FindDictionary(std::string_view name) const {
  auto it = dictionaries_.find(name);
  return it == dictionaries_.end() ? nullptr : &it->second;
}

void RegionStore::RegisterDictionary(Dictionary dict) {
  auto name = dict.name;
  dictionaries_[name] = std::move(dict);
}

std::vector<StoredRegionRecord> RegionStore::Records() const {
  std::vector<StoredRegionRecord> out;
  out.reserve(regions_.size());
  for (const auto &page : pages_) {
    for (RegionRef ref = page.first; ref < page.end(); ++ref) {
      const auto &r = regions_[ref];
      out.push_back(StoredRegionRecord{
          page.id, r.id, r.rect, r.text_span.begin, r.text_span.end, r.text,
          r.html_tag, regions_[page.first + r.minimal].id,
          regions_[page.first + r.maximal].id});
    }
  }
  return out;
}

bool operator==(const RegionStore &a, const RegionStore &b) {
  if (a.pages_.size() != b.pages_.size()) return false;
  for (std::size_t i = 0; i < a.pages_.size(); ++i) {
    if (a.pages_[i].id != b.pages_[i].id ||
        a.pages_[i].document != b.pages_[i].document) {
      return false;
    }
  }
  return a.dictionaries_ == b.dictionaries_ && a.Records() == b.Records();
}

void StoreBuilder::Add(StoredRegionRecord record) {
  records_.push_back(std::move(record));
}

void StoreBuilder::AddDictionary(Dictionary dict) {
  auto name = dict.name;
  dictionaries_[name] = std::move(dict);
}

RegionStore StoreBuilder::Build() && {
  for (const auto &r : records_) ValidateRecord(r);
  std::sort(records_.begin(), records_.end(),
            [](const StoredRegionRecord &a, const StoredRegionRecord &b) {
              if (a.page_id != b.page_id) return a.page_id < b.page_id;
              return a.region_id < b.region_id;
            });

  RegionStore store;
  store.dictionaries_ = std::move(dictionaries_);
  store.regions_.reserve(records_.size());

  std::size_t i = 0;
  while (i < records_.size()) {
    std::size_t j = i;
    while (j < records_.size() && records_[j].page_id == records_[i].page_id) ++j;
    const std::string &page_id = records_[i].page_id;
    auto page_no = static_cast<std::uint32_t>(store.pages_.size());
    Page page;
    page.id = page_id;
    page.first = static_cast<RegionRef>(store.regions_.size());
    page.count = static_cast<std::uint32_t>(j - i);

    std::vector<bool> keep_min(page.count), keep_max(page.count);
    // Ancestor chain of the previous region, as page-local indices.
    std::vector<std::int32_t> stack;
    for (std::size_t k = i; k < j; ++k) {
      auto &rec = records_[k];
      auto local = static_cast<std::int32_t>(k - i);
      if (k > i && records_[k - 1].region_id == rec.region_id) {
        Invalid(page_id, &rec.region_id, "duplicate region_id");
      }
      StoredRegion r;
      r.id = rec.region_id;
      r.rect = rec.region;
      r.text_span = TextSpan{rec.text_start, rec.text_end};
      r.text = std::move(rec.text);
      r.html_tag = std::move(rec.html_tag);
      r.page = page_no;
      r.subtree_end = local + 1;

      auto base = store.regions_.begin() + page.first;
      while (!stack.empty() && !IdIsPrefix(base[stack.back()].id, r.id)) {
        stack.pop_back();
      }
      if (r.id.IsRoot()) {
        if (local != 0) Invalid(page_id, &r.id, "second root region on page");
      } else {
        if (stack.empty() || base[stack.back()].id != r.id.Parent()) {
          Invalid(page_id, &r.id,
                  "parent " + r.id.Parent().ToString() + " is missing");
        }
        const auto &parent = base[stack.back()];
        if (parent.text_span.begin > r.text_span.begin ||
            r.text_span.end > parent.text_span.end) {
          Invalid(page_id, &r.id,
                  "containment: text offsets (" +
                      std::to_string(r.text_span.begin) + "," +
                      std::to_string(r.text_span.end) +
                      ") exceed parent " + parent.id.ToString() + " (" +
                      std::to_string(parent.text_span.begin) + "," +
                      std::to_string(parent.text_span.end) + ")");
        }
        r.parent = stack.back();
      }
      if (local == 0 && !r.id.IsRoot()) {
        Invalid(page_id, &r.id, "page has no root region");
      }
      for (auto a : stack) base[a].subtree_end = local + 1;
      stack.push_back(local);

      if (rec.minimal_region || rec.maximal_region) {
        keep_min[local] = rec.minimal_region.has_value();
        keep_max[local] = rec.maximal_region.has_value();
      }
      store.regions_.push_back(std::move(r));
    }

    std::span<StoredRegion> regs(store.regions_.data() + page.first, page.count);

    // Stored texts tile the document without gaps or overlaps.
    std::vector<std::int32_t> texty;
    for (std::size_t k = 0; k < regs.size(); ++k) {
      if (!regs[k].text.empty()) texty.push_back(static_cast<std::int32_t>(k));
    }
    std::sort(texty.begin(), texty.end(), [&](std::int32_t a, std::int32_t b) {
      return regs[a].text_span.begin < regs[b].text_span.begin;
    });
    std::int64_t cursor = 0;
    for (auto k : texty) {
      const auto &r = regs[k];
      if (r.text_span.begin != cursor) {
        Invalid(page_id, &r.id,
                std::string(r.text_span.begin > cursor ? "gap" : "overlap") +
                    " in document text at offset " + std::to_string(cursor));
      }
      page.document += r.text;
      cursor = r.text_span.end;
    }

    // Supplied links must resolve to an ancestor-or-self / descendant-or-self.
    for (std::size_t k = i; k < j; ++k) {
      auto local = static_cast<std::int32_t>(k - i);
      const auto &rec = records_[k];
      auto resolve = [&](const RegionId &target) -> std::int32_t {
        auto it = std::lower_bound(
            regs.begin(), regs.end(), target,
            [](const StoredRegion &r, const RegionId &key) { return r.id < key; });
        if (it == regs.end() || it->id != target) {
          Invalid(page_id, &regs[local].id,
                  "linked region " + target.ToString() + " does not exist");
        }
        return static_cast<std::int32_t>(it - regs.begin());
      };
      if (keep_min[local]) {
        regs[local].minimal = resolve(*rec.minimal_region);
        if (!IdIsPrefix(regs[local].id, *rec.minimal_region)) {
          Invalid(page_id, &regs[local].id, "minimal_region is not a descendant");
        }
      }
      if (keep_max[local]) {
        regs[local].maximal = resolve(*rec.maximal_region);
        if (!IdIsPrefix(*rec.maximal_region, regs[local].id)) {
          Invalid(page_id, &regs[local].id, "maximal_region is not an ancestor");
        }
      }
    }
    DerivePageMinMax(regs, keep_min, keep_max);

    store.page_index_.emplace(page.id, page_no);
    store.pages_.push_back(std::move(page));
    i = j;
  }
  records_.clear();
  return store;
}

RegionStore LoadStore(std::istream &in) {
  StoreBuilder builder;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error &e) {
      LineError(line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) LineError(line_no, "expected a JSON object");
    if (j.contains("dictionary")) {
      Dictionary dict;
      dict.name = StringField(j, "dictionary", line_no);
      const auto &phrases = Field(j, "phrases", line_no);
      if (!phrases.is_array()) LineError(line_no, "'phrases' must be an array");
      for (const auto &p : phrases) {
        if (!p.is_string()) LineError(line_no, "phrases must be strings");
        dict.phrases.push_back(p.get<std::string>());
      }
      builder.AddDictionary(std::move(dict));
      continue;
    }
    StoredRegionRecord rec;
    rec.page_id = StringField(j, "page_id", line_no);
    rec.region_id = IdField(j, "region_id", line_no);
    rec.region = Region{NumberField(j, "xl", line_no), NumberField(j, "yl", line_no),
                        NumberField(j, "xh", line_no), NumberField(j, "yh", line_no)};
    rec.text_start = IntField(j, "text_start", line_no);
    rec.text_end = IntField(j, "text_end", line_no);
    rec.text = StringField(j, "text", line_no);
    rec.html_tag = StringField(j, "html_tag", line_no);
    if (j.contains("minimal_region") && !j["minimal_region"].is_null()) {
      rec.minimal_region = IdField(j, "minimal_region", line_no);
    }
    if (j.contains("maximal_region") && !j["maximal_region"].is_null()) {
      rec.maximal_region = IdField(j, "maximal_region", line_no);
    }
    builder.Add(std::move(rec));
  }
  return std::move(builder).Build();
}

RegionStore LoadStoreFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return LoadStore(in);
}

void SaveStore(const RegionStore &store, std::ostream &out) {
  for (const auto &[name, dict] : store.dictionaries()) {
    ordered_json j;
    j["dictionary"] = name;
    j["phrases"] = dict.phrases;
    out << j.dump() << '\n';
  }
  for (const auto &rec : store.Records()) {
    out << RecordToJson(rec).dump() << '\n';
  }
}

void SaveStoreFile(const RegionStore &store, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  SaveStore(store, out);
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

Dictionary LoadDictionaryFile(const std::string &name, const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open dictionary '" + path + "'");
  Dictionary dict;
  dict.name = name;
  std::string line;
  while (std::getline(in, line)) {
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    dict.phrases.push_back(line.substr(b, e - b + 1));
  }
  return dict;
}

EffectiveText GetEffectiveText(const RegionStore &store, RegionRef ref) {
  const auto &page = store.page_of(ref);
  std::span<const StoredRegion> regs(store.regions().data() + page.first,
                                     page.count);
  auto local = static_cast<std::int32_t>(ref - page.first);
  const auto &r = regs[local];
  if (!r.text.empty()) return {r.text, r.text_span};
  std::vector<std::int32_t> leaves;
  for (auto j = local + 1; j < r.subtree_end; ++j) {
    if (!regs[j].text.empty()) leaves.push_back(j);
  }
  std::sort(leaves.begin(), leaves.end(), [&](std::int32_t a, std::int32_t b) {
    return regs[a].text_span.begin < regs[b].text_span.begin;
  });
  EffectiveText out{{}, r.text_span};
  for (auto j : leaves) out.text += regs[j].text;
  return out;
}

EffectiveText GetEffectiveText(const RegionStore &store,
                               std::string_view page_id, const RegionId &id) {
  auto ref = store.Find(page_id, id);
  if (!ref) {
    throw Error(ErrorCode::kNotFound, "no region " + id.ToString() +
                                          " on page '" + std::string(page_id) +
                                          "'");
  }
  return GetEffectiveText(store, *ref);
}

RegionStore DeriveMinMax(const RegionStore &store) {
  StoreBuilder builder;
  for (auto rec : store.Records()) {
    rec.minimal_region.reset();
    rec.maximal_region.reset();
    builder.Add(std::move(rec));
  }
  for (const auto &[name, dict] : store.dictionaries()) builder.AddDictionary(dict);
  return std::move(builder).Build();
}

std::optional<RegionRef> InnermostCovering(const RegionStore &store,
                                           std::uint32_t page,
                                           const TextSpan &span) {
  const Page &p = store.pages()[page];
  std::optional<RegionRef> best;
  std::size_t best_depth = 0;
  for (RegionRef ref = p.first; ref < p.end(); ++ref) {
    const auto &r = store.region(ref);
    if (r.text_span.begin <= span.begin && span.end <= r.text_span.end &&
        (!best || r.id.depth() > best_depth)) {
      best = ref;
      best_depth = r.id.depth();
    }
  }
  return best;
}

}  // namespace vqe
