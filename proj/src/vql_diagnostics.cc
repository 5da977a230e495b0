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

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <string>

#include "vqe/vql.h"

namespace vqe::vql {

namespace {

const char *SeverityName(Severity s) {
  switch (s) {
    case Severity::kError: return "error";
    case Severity::kWarning: return "warning";
    case Severity::kNote: return "note";
  }
  return "error";
}

const char *SeverityColor(Severity s) {
  switch (s) {
    case Severity::kError: return "\x1b[1;31m";
    case Severity::kWarning: return "\x1b[1;33m";
    case Severity::kNote: return "\x1b[1;36m";
  }
  return "";
}

bool IsContinuation(char c) { return (static_cast<unsigned char>(c) & 0xC0) == 0x80; }

// Code points in [from, to); columns count characters, not bytes.
std::size_t Width(std::string_view s, std::size_t from, std::size_t to) {
  std::size_t n = 0;
  for (std::size_t i = from; i < to && i < s.size(); ++i) {
    if (!IsContinuation(s[i])) ++n;
  }
  return n;
}

}  // namespace

void SortDiagnostics(std::vector<Diagnostic> &diags) {
  std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic &a, const Diagnostic &b) {
    if (a.range.begin != b.range.begin) return a.range.begin < b.range.begin;
    return a.range.end < b.range.end;
  });
}

bool HasErrors(const std::vector<Diagnostic> &diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic &d) { return d.severity == Severity::kError; });
}

std::string RenderDiagnostics(std::string_view source,
                              const std::vector<Diagnostic> &diags, bool color) {
  std::string out;
  const char *reset = color ? "\x1b[0m" : "";
  const char *bold = color ? "\x1b[1m" : "";
  for (const auto &d : diags) {
    std::size_t begin = std::min<std::size_t>(d.range.begin, source.size());
    std::size_t end = std::clamp<std::size_t>(d.range.end, begin, source.size());
    std::size_t line_start = 0;
    if (begin > 0) {
      std::size_t nl = source.rfind('\n', begin - 1);
      if (nl != std::string_view::npos) line_start = nl + 1;
    }
    std::size_t line_end = source.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = source.size();
    std::size_t line_no = 1 + std::count(source.begin(), source.begin() + line_start, '\n');
    std::size_t col = 1 + Width(source, line_start, begin);

    out += bold;
    out += std::to_string(line_no) + ":" + std::to_string(col) + ": ";
    out += reset;
    if (color) out += SeverityColor(d.severity);
    out += SeverityName(d.severity);
    out += "[" + d.code + "]";
    out += reset;
    out += ": " + d.message + "\n";

    std::string_view line = source.substr(line_start, line_end - line_start);
    out += "  ";
    out += line;
    out += "\n  ";
    out += std::string(col - 1, ' ');
    std::size_t span = std::max<std::size_t>(1, Width(source, begin, std::min(end, line_end)));
    if (color) out += "\x1b[1;32m";
    out += '^';
    out += std::string(span - 1, '~');
    out += reset;
    out += '\n';
    if (!d.hint.empty()) out += "  hint: " + d.hint + "\n";
  }
  return out;
}

bool ColorFromEnvironment(int fd) {
  const char *v = std::getenv("VQL_COLOR");
  std::string mode = v ? v : "auto";
  if (mode == "always") return true;
  if (mode == "never") return false;
  return isatty(fd) != 0;
}

}  // namespace vqe::vql
