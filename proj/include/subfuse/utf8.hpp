// Copyright 2026  The subfuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <string_view>

namespace subfuse {

// Decodes UTF-8 into code points. Throws Error(kParse) on malformed input.
std::u32string utf8_decode(std::string_view text);
std::string utf8_encode(std::u32string_view text);
void utf8_append(std::string& out, char32_t cp);

bool is_space(char32_t cp);

// Leading/trailing whitespace removed.
std::u32string strip(std::u32string_view text);
std::string strip_utf8(std::string_view text);

// Every whitespace code point removed.
std::u32string remove_spaces(std::u32string_view text);

}  // namespace subfuse
