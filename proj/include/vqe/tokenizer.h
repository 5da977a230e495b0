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

#ifndef VQE_TOKENIZER_H_
#define VQE_TOKENIZER_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vqe {

// A case-folded maximal run of alphanumeric code points. Offsets are byte
// offsets into the tokenized string.
struct Token {
  std::string text;
  std::int64_t begin = 0;
  std::int64_t end = 0;

  friend bool operator==(const Token &, const Token &) = default;
};

// Splits UTF-8 text into tokens. Invalid UTF-8 bytes act as separators.
std::vector<Token> Tokenize(std::string_view text);

// Folded token texts only.
std::vector<std::string> TokenTexts(std::string_view text);

}  // namespace vqe

#endif  // VQE_TOKENIZER_H_
