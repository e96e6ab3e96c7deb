// Copyright 2026 The mtcorpus Authors.
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

#ifndef MTCORPUS_UTF8_H_
#define MTCORPUS_UTF8_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mtcorpus::utf8 {

// Offset of the first byte that does not start a well-formed sequence, or
// nullopt when the whole input is valid UTF-8. Overlong forms, surrogates and
// code points above U+10FFFF are rejected.
std::optional<std::size_t> FindInvalid(std::string_view s);

inline bool IsValid(std::string_view s) { return !FindInvalid(s); }

// True when `offset` is 0, s.size(), or the start of a code point.
bool IsCharBoundary(std::string_view s, std::size_t offset);

// Decodes the code point at `pos` and advances `pos`. Input must be valid.
char32_t Next(std::string_view s, std::size_t &pos);

void Append(std::string &out, char32_t cp);

bool IsSpace(char32_t cp);
bool IsPunct(char32_t cp);
bool IsUpper(char32_t cp);
bool IsDigit(char32_t cp);
char32_t ToLower(char32_t cp);

std::string ToLower(std::string_view s);

}  // namespace mtcorpus::utf8

#endif  // MTCORPUS_UTF8_H_
