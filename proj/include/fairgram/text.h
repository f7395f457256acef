// Copyright 2026 The Fairgram Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fairgram {

std::string to_lower(std::string_view s);

// Letters, digits, apostrophe and underscore.
bool is_word_char(char c);

// Case-insensitive search for `needle` not embedded in a longer word.
bool contains_word(std::string_view haystack, std::string_view needle);

// Maximal runs of word characters, in order.
std::vector<std::string> words(std::string_view text);

}  // namespace fairgram
