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

#include "vqe/synth.h"

#include <algorithm>
#include <cstdio>
#include <random>

#include "vqe/error.h"

namespace vqe {

namespace {

// std:: distributions are implementation-defined; draws are derived from
// the engine output directly so stores are identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Below(std::uint64_t n) { return engine_() % n; }
  int Between(int lo, int hi) {
    return lo + static_cast<int>(Below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

 private:
  std::mt19937_64 engine_;
};

constexpr double kPageWidth = 1280;
constexpr double kRowHeight = 20;
constexpr double kRowGap = 10;

class PageGen {
 public:
  PageGen(std::string page_id, std::size_t budget,
          const std::vector<std::string> &vocab, Rng &rng)
      : page_id_(std::move(page_id)), budget_(budget), vocab_(vocab), rng_(rng) {}

  bool HasBudget(std::size_t n = 1) const { return budget_ >= n; }

  // Opens an inner node; returns its record index, or -1 when out of budget.
  int Open(const RegionId &id, Region rect, const char *tag) {
    if (budget_ == 0) return -1;
    --budget_;
    records_.push_back(StoredRegionRecord{page_id_, id, rect, cursor_, cursor_,
                                          "", tag, std::nullopt, std::nullopt});
    return static_cast<int>(records_.size() - 1);
  }

  void Close(int index) {
    if (index >= 0) records_[index].text_end = cursor_;
  }

  bool Leaf(const RegionId &id, Region rect, const char *tag, std::string text) {
    if (budget_ == 0) return false;
    --budget_;
    auto begin = cursor_;
    cursor_ += static_cast<std::int64_t>(text.size());
    records_.push_back(StoredRegionRecord{page_id_, id, rect, begin, cursor_,
                                          std::move(text), tag, std::nullopt,
                                          std::nullopt});
    return true;
  }

  std::string Words(int lo, int hi) {
    int n = rng_.Between(lo, hi);
    std::string out;
    for (int i = 0; i < n; ++i) {
      if (i > 0) out.push_back(' ');
      out += vocab_[rng_.Below(vocab_.size())];
    }
    return out;
  }

  Rng &rng() { return rng_; }
  std::vector<StoredRegionRecord> &records() { return records_; }

 private:
  std::string page_id_;
  std::size_t budget_;
  const std::vector<std::string> &vocab_;
  Rng &rng_;
  std::vector<StoredRegionRecord> records_;
  std::int64_t cursor_ = 0;
};

// Header band with a logo and a title cell inside A(450,0,inf,500).
void Header(PageGen &g, const RegionId &id, bool motif) {
  int h = g.Open(id, Region{0, 0, kPageWidth, 80}, "div");
  if (h < 0) return;
  g.Leaf(id.Child(1), Region{10, 10, 200, 60}, "span", g.Words(1, 2));
  g.Leaf(id.Child(2), Region{600, 20, 900, 50}, "h1",
         motif ? "System Requirements" : g.Words(1, 3));
  g.Close(h);
}

// Vertically aligned links at x_l = 10, 10px apart.
double Nav(PageGen &g, const RegionId &id) {
  int links = g.rng().Between(5, 8);
  double bottom = 90 + 10 + links * (kRowHeight + kRowGap);
  int n = g.Open(id, Region{0, 90, 200, bottom}, "ul");
  if (n < 0) return 90;
  for (int i = 0; i < links; ++i) {
    double y = 100 + i * (kRowHeight + kRowGap);
    if (!g.Leaf(id.Child(static_cast<std::uint32_t>(i + 1)),
                Region{10, y, 190, y + kRowHeight}, "a", g.Words(1, 2))) {
      break;
    }
  }
  g.Close(n);
  return bottom;
}

// The requirements table: a header row and one row per operating system.
double MotifTable(PageGen &g, const RegionId &id, double top) {
  const auto &os = OperatingSystemNames();
  int rows = g.rng().Between(3, static_cast<int>(os.size()));
  double bottom = top + (rows + 1) * (kRowHeight + kRowGap);
  int t = g.Open(id, Region{540, top, 1000, bottom}, "table");
  if (t < 0) return top;
  auto row = [&](std::uint32_t r, double y, std::string left, std::string right) {
    RegionId rid = id.Child(r);
    int tr = g.Open(rid, Region{540, y, 1000, y + kRowHeight}, "tr");
    if (tr < 0) return false;
    g.Leaf(rid.Child(1), Region{540, y, 700, y + kRowHeight}, "td", std::move(left));
    g.Leaf(rid.Child(2), Region{720, y, 1000, y + kRowHeight}, "td", std::move(right));
    g.Close(tr);
    return g.HasBudget();
  };
  bool more = row(1, top, "Operating Systems", "Requirements");
  for (int r = 0; r < rows && more; ++r) {
    double y = top + (r + 1) * (kRowHeight + kRowGap);
    std::string req = std::to_string(1 << g.rng().Between(8, 13)) + " MB " +
                      g.Words(1, 2);
    more = row(static_cast<std::uint32_t>(r + 2), y, os[r], std::move(req));
  }
  g.Close(t);
  return bottom;
}

// A generic table with aligned columns.
double PlainTable(PageGen &g, const RegionId &id, double top) {
  int rows = g.rng().Between(3, 12);
  int cols = g.rng().Between(2, 5);
  double cell_w = 680.0 / cols;
  double bottom = top + rows * (kRowHeight + kRowGap);
  int t = g.Open(id, Region{540, top, 1240, bottom}, "table");
  if (t < 0) return top;
  for (int r = 0; r < rows && g.HasBudget(); ++r) {
    double y = top + r * (kRowHeight + kRowGap);
    RegionId rid = id.Child(static_cast<std::uint32_t>(r + 1));
    int tr = g.Open(rid, Region{540, y, 1240, y + kRowHeight}, "tr");
    for (int c = 0; c < cols && g.HasBudget(); ++c) {
      double x = 540 + c * cell_w;
      g.Leaf(rid.Child(static_cast<std::uint32_t>(c + 1)),
             Region{x + 2, y, x + cell_w - 2, y + kRowHeight}, "td",
             g.Words(1, 3));
    }
    g.Close(tr);
  }
  g.Close(t);
  return bottom;
}

std::vector<StoredRegionRecord> GeneratePage(std::size_t page_no,
                                             std::size_t regions,
                                             const std::vector<std::string> &vocab,
                                             Rng &rng) {
  char name[32];
  std::snprintf(name, sizeof(name), "p%07zu", page_no + 1);
  PageGen g(name, regions, vocab, rng);
  RegionId root{1};
  if (regions == 1) {
    g.Leaf(root, Region{0, 0, kPageWidth, 100}, "html", g.Words(1, 1));
    return std::move(g.records());
  }
  bool motif = page_no % 10 == 0;
  int r = g.Open(root, Region{0, 0, kPageWidth, 0}, "body");
  Header(g, root.Child(1), motif);
  double bottom = Nav(g, root.Child(2));
  int content = g.Open(root.Child(3), Region{520, 90, 1260, 90}, "div");
  double y = 100;
  std::uint32_t table = 1;
  if (motif && g.HasBudget()) {
    y = MotifTable(g, root.Child(3).Child(table++), y) + 20;
  }
  while (g.HasBudget()) {
    y = PlainTable(g, root.Child(3).Child(table++), y) + 20;
  }
  g.Close(content);
  g.Close(r);
  auto &recs = g.records();
  double page_h = std::max(bottom, y) + 20;
  recs[r].region.yh = page_h;
  if (content >= 0) recs[content].region.yh = std::max(90.0, y);
  return std::move(recs);
}

}  // namespace

const std::vector<std::string> &DefaultVocabulary() {
  static const std::vector<std::string> words = {
      "product",   "support",  "download", "price",     "overview",
      "features",  "contact",  "home",     "news",      "documentation",
      "license",   "version",  "update",   "release",   "service",
      "solution",  "customer", "partner",  "training",  "community",
      "storage",   "network",  "server",   "database",  "security",
      "software",  "hardware", "cloud",    "analytics", "platform",
      "developer", "forum",    "blog",     "careers",   "events",
      "privacy",   "terms",    "search",   "account",   "cart",
      "catalog",   "manual",   "guide",    "faq",       "video",
      "white",     "paper",    "case",     "study",     "webinar",
      "trial",     "edition",  "enterprise", "express", "standard",
      "premium",   "backup",   "monitor",  "deploy",    "migrate"};
  return words;
}

const std::vector<std::string> &OperatingSystemNames() {
  static const std::vector<std::string> names = {
      "Windows", "Linux", "AIX", "Solaris", "HP-UX", "Mac OS X", "z/OS"};
  return names;
}

RegionStore SynthCorpus(std::size_t pages, std::size_t regions_per_page,
                        const std::vector<std::string> &vocabulary,
                        std::uint64_t seed) {
  if (pages == 0 || regions_per_page == 0) {
    throw Error(ErrorCode::kRuntime, "synthetic corpus needs positive counts");
  }
  if (vocabulary.empty()) {
    throw Error(ErrorCode::kRuntime, "synthetic corpus needs a vocabulary");
  }
  Rng rng(seed);
  StoreBuilder builder;
  for (std::size_t p = 0; p < pages; ++p) {
    for (auto &rec : GeneratePage(p, regions_per_page, vocabulary, rng)) {
      builder.Add(std::move(rec));
    }
  }
  builder.AddDictionary(Dictionary{"T", OperatingSystemNames()});
  return std::move(builder).Build();
}

}  // namespace vqe
