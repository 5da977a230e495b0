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

#include "support/fixtures.h"

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vqe::testing {

std::string FixturePath(const std::string &relative) {
  return std::string(VQE_FIXTURE_DIR) + "/" + relative;
}

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RegionStore SysreqStore() {
  RegionStore store = LoadStoreFile(FixturePath("sysreq.jsonl"));
  store.RegisterDictionary(LoadDictionaryFile("T", FixturePath("os.dict")));
  return store;
}

RegionStore PageStore(const std::vector<R> &regions, const std::string &page_id) {
  std::vector<StoredRegionRecord> recs;
  std::int64_t cursor = 0;
  for (const auto &r : regions) {
    StoredRegionRecord rec;
    rec.page_id = page_id;
    rec.region_id = RegionId::Parse(r.id);
    rec.region = r.rect;
    rec.text = r.text;
    rec.html_tag = "div";
    rec.text_start = cursor;
    cursor += static_cast<std::int64_t>(rec.text.size());
    rec.text_end = cursor;
    recs.push_back(std::move(rec));
  }
  // Inner nodes cover every descendant's offsets.
  for (auto &rec : recs) {
    for (const auto &other : recs) {
      if (other.region_id != rec.region_id && IdIsPrefix(rec.region_id, other.region_id)) {
        rec.text_start = std::min(rec.text_start, other.text_start);
        rec.text_end = std::max(rec.text_end, other.text_end);
      }
    }
  }
  StoreBuilder b;
  for (auto &rec : recs) b.Add(std::move(rec));
  return std::move(b).Build();
}

VisualSpan Span(const RegionStore &store, const std::string &page_id,
                const std::string &id) {
  auto ref = store.Find(page_id, RegionId::Parse(id));
  if (!ref) throw std::runtime_error("no region " + id);
  return store.SpanOf(*ref);
}

VisualSpan Synth(Region rect, TextSpan span, const std::string &page_id) {
  return VisualSpan{page_id, span, rect, std::nullopt};
}

CommandResult RunCommand(const std::string &command) {
  CommandResult result;
  FILE *pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) throw std::runtime_error("popen failed");
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    result.out.append(buf.data(), n);
  }
  int status = pclose(pipe);
  result.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string CliPath() { return VQE_CLI_PATH; }

std::string TempDir(const std::string &name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("vqe_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace vqe::testing
