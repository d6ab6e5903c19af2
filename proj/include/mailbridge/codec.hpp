/*
 * Copyright 2026 The mailbridge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstddef>
#include <string>
#include <string_view>

/// Byte-level encodings shared by the mail and XMPP sides.
namespace mailbridge::codec
{

std::string base64_encode(std::string_view octets);

/// Lenient decoder: skips whitespace and foreign characters, stops at padding.
std::string base64_decode(std::string_view text);

/// Quoted-printable body decoding, soft line breaks included. Malformed escapes pass through literally.
std::string quoted_printable_decode(std::string_view text);

/// RFC 2047 "Q" encoding: like quoted-printable, but '_' stands for a space.
std::string q_decode(std::string_view text);

/// Replaces every byte that does not start a well-formed UTF-8 sequence with U+FFFD.
std::string utf8_sanitize(std::string_view octets);

bool is_valid_utf8(std::string_view octets);

std::string latin1_to_utf8(std::string_view octets);

enum class Charset
{
    utf8,
    latin1,
    ascii,
    unknown,
};

Charset charset_from_name(std::string_view name);

/// Converts octets in the given charset to UTF-8. Unknown charsets are decoded as lossy UTF-8.
std::string to_utf8(std::string_view octets, Charset charset);

/// Number of code points in a valid UTF-8 string.
std::size_t utf8_length(std::string_view text);

/// Longest prefix of `text` holding at most `max_chars` code points.
std::string_view utf8_prefix(std::string_view text, std::size_t max_chars);

std::string ascii_lower(std::string_view text);
bool iequals(std::string_view a, std::string_view b);
bool istarts_with(std::string_view text, std::string_view prefix);
std::string_view trim(std::string_view text);

inline bool is_wsp(char c) { return c == ' ' || c == '\t'; }
inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

} // namespace mailbridge::codec
