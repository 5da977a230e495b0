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

#include "vqe/tokenizer.h"

#include <locale.h>
#include <wctype.h>

#include <boost/locale/utf.hpp>

namespace vqe {

namespace {

using Utf8 = boost::locale::utf::utf_traits<char>;
using boost::locale::utf::code_point;

// Wide-character classification needs a UTF-8 aware locale; created once
// and never freed. Falls back to ASCII-only rules if unavailable.
locale_t UnicodeLocale() {
  static const locale_t loc = [] {
    locale_t l = newlocale(LC_CTYPE_MASK, "C.UTF-8", static_cast<locale_t>(0));
    if (l == static_cast<locale_t>(0)) {
      l = newlocale(LC_CTYPE_MASK, "C.utf8", static_cast<locale_t>(0));
    }
    return l;
  }();
  return loc;
}

bool IsAlnum(code_point c) {
  if (c < 0x80) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
           (c >= 'A' && c <= 'Z');
  }
  locale_t loc = UnicodeLocale();
  return loc != static_cast<locale_t>(0) &&
         iswalnum_l(static_cast<wint_t>(c), loc) != 0;
}

code_point Fold(code_point c) {
  if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + ('a' - 'A') : c;
  locale_t loc = UnicodeLocale();
  if (loc == static_cast<locale_t>(0)) return c;
  return static_cast<code_point>(towlower_l(static_cast<wint_t>(c), loc));
}

void AppendUtf8(std::string &out, code_point c) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
    return;
  }
  char buf[4];
  char *end = Utf8::encode(c, buf);
  out.append(buf, end);
}

}  // namespace

std::vector<Token> Tokenize(std::string_view text) {
  std::vector<Token> out;
  const char *const base = text.data();
  const char *p = base;
  const char *const e = base + text.size();
  Token cur;
  bool in_token = false;
  while (p < e) {
    const char *start = p;
    code_point c;
    if (static_cast<unsigned char>(*p) < 0x80) {
      c = static_cast<unsigned char>(*p++);
    } else {
      c = Utf8::decode(p, e);
      if (c == boost::locale::utf::illegal || c == boost::locale::utf::incomplete) {
        p = start + 1;
        c = 0;
      }
    }
    if (c != 0 && IsAlnum(c)) {
      if (!in_token) {
        cur.text.clear();
        cur.begin = start - base;
        in_token = true;
      }
      AppendUtf8(cur.text, Fold(c));
      cur.end = p - base;
    } else if (in_token) {
      out.push_back(cur);
      in_token = false;
    }
  }
  if (in_token) out.push_back(std::move(cur));
  return out;
}

std::vector<std::string> TokenTexts(std::string_view text) {
  std::vector<std::string> out;
  for (auto &t : Tokenize(text)) out.push_back(std::move(t.text));
  return out;
}

}  // namespace vqe
