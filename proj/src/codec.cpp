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
#include "mailbridge/codec.hpp"

#include <array>
#include <cstdint>

namespace mailbridge::codec
{

namespace
{

constexpr std::string_view alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

constexpr std::array<int, 256> make_reverse_alphabet()
{
    std::array<int, 256> table{};
    for (auto& v : table)
        v = -1;
    for (std::size_t i = 0; i < alphabet.size(); ++i)
        table[static_cast<unsigned char>(alphabet[i])] = static_cast<int>(i);
    return table;
}

constexpr auto reverse_alphabet = make_reverse_alphabet();

int hex_value(char c)
{
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    return -1;
}

void append_utf8(std::string& out, std::uint32_t cp)
{
    if (cp < 0x80)
    {
        out.push_back(static_cast<char>(cp));
    }
    else if (cp < 0x800)
    {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
    else if (cp < 0x10000)
    {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
    else
    {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

constexpr std::string_view replacement = "\xEF\xBF\xBD";

// Length of the well-formed UTF-8 sequence starting at `pos`, or 0 when ill-formed.
std::size_t utf8_sequence_length(std::string_view s, std::size_t pos)
{
    const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
    const unsigned char lead = byte(pos);
    if (lead < 0x80)
        return 1;

    std::size_t len = 0;
    unsigned char lo = 0x80, hi = 0xBF;
    if (lead >= 0xC2 && lead <= 0xDF)
        len = 2;
    else if (lead >= 0xE0 && lead <= 0xEF)
    {
        len = 3;
        if (lead == 0xE0)
            lo = 0xA0;
        else if (lead == 0xED)
            hi = 0x9F;
    }
    else if (lead >= 0xF0 && lead <= 0xF4)
    {
        len = 4;
        if (lead == 0xF0)
            lo = 0x90;
        else if (lead == 0xF4)
            hi = 0x8F;
    }
    else
        return 0;

    if (pos + len > s.size())
        return 0;
    if (byte(pos + 1) < lo || byte(pos + 1) > hi)
        return 0;
    for (std::size_t i = 2; i < len; ++i)
        if (byte(pos + i) < 0x80 || byte(pos + i) > 0xBF)
            return 0;
    return len;
}

} // namespace

std::string base64_encode(std::string_view octets)
{
    std::string out;
    out.reserve((octets.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= octets.size(); i += 3)
    {
        const std::uint32_t n = (static_cast<unsigned char>(octets[i]) << 16) |
                                (static_cast<unsigned char>(octets[i + 1]) << 8) |
                                static_cast<unsigned char>(octets[i + 2]);
        out.push_back(alphabet[(n >> 18) & 0x3F]);
        out.push_back(alphabet[(n >> 12) & 0x3F]);
        out.push_back(alphabet[(n >> 6) & 0x3F]);
        out.push_back(alphabet[n & 0x3F]);
    }
    const std::size_t rest = octets.size() - i;
    if (rest == 1)
    {
        const std::uint32_t n = static_cast<unsigned char>(octets[i]) << 16;
        out.push_back(alphabet[(n >> 18) & 0x3F]);
        out.push_back(alphabet[(n >> 12) & 0x3F]);
        out.append("==");
    }
    else if (rest == 2)
    {
        const std::uint32_t n = (static_cast<unsigned char>(octets[i]) << 16) |
                                (static_cast<unsigned char>(octets[i + 1]) << 8);
        out.push_back(alphabet[(n >> 18) & 0x3F]);
        out.push_back(alphabet[(n >> 12) & 0x3F]);
        out.push_back(alphabet[(n >> 6) & 0x3F]);
        out.push_back('=');
    }
    return out;
}

std::string base64_decode(std::string_view text)
{
    std::string out;
    out.reserve(text.size() / 4 * 3);
    std::uint32_t buffer = 0;
    int bits = 0;
    for (char c : text)
    {
        if (c == '=')
            break;
        const int v = reverse_alphabet[static_cast<unsigned char>(c)];
        if (v < 0)
            continue;
        buffer = (buffer << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8)
        {
            bits -= 8;
            out.push_back(static_cast<char>((buffer >> bits) & 0xFF));
        }
    }
    return out;
}

std::string quoted_printable_decode(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i)
    {
        const char c = text[i];
        if (c != '=')
        {
            out.push_back(c);
            continue;
        }
        if (i + 2 < text.size() && hex_value(text[i + 1]) >= 0 && hex_value(text[i + 2]) >= 0)
        {
            out.push_back(static_cast<char>(hex_value(text[i + 1]) * 16 + hex_value(text[i + 2])));
            i += 2;
            continue;
        }
        // soft line break: '=' then optional whitespace then a line ending or end of input
        std::size_t j = i + 1;
        while (j < text.size() && is_wsp(text[j]))
            ++j;
        if (j == text.size())
        {
            i = j - 1;
            continue;
        }
        if (text[j] == '\r' || text[j] == '\n')
        {
            if (text[j] == '\r' && j + 1 < text.size() && text[j + 1] == '\n')
                ++j;
            i = j;
            continue;
        }
        out.push_back('=');
    }
    return out;
}

std::string q_decode(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i)
    {
        const char c = text[i];
        if (c == '_')
            out.push_back(' ');
        else if (c == '=' && i + 2 < text.size() && hex_value(text[i + 1]) >= 0 && hex_value(text[i + 2]) >= 0)
        {
            out.push_back(static_cast<char>(hex_value(text[i + 1]) * 16 + hex_value(text[i + 2])));
            i += 2;
        }
        else
            out.push_back(c);
    }
    return out;
}

std::string utf8_sanitize(std::string_view octets)
{
    std::string out;
    out.reserve(octets.size());
    std::size_t i = 0;
    while (i < octets.size())
    {
        const std::size_t len = utf8_sequence_length(octets, i);
        if (len == 0)
        {
            out.append(replacement);
            ++i;
        }
        else
        {
            out.append(octets.substr(i, len));
            i += len;
        }
    }
    return out;
}

bool is_valid_utf8(std::string_view octets)
{
    std::size_t i = 0;
    while (i < octets.size())
    {
        const std::size_t len = utf8_sequence_length(octets, i);
        if (len == 0)
            return false;
        i += len;
    }
    return true;
}

std::string latin1_to_utf8(std::string_view octets)
{
    std::string out;
    out.reserve(octets.size() * 2);
    for (char c : octets)
        append_utf8(out, static_cast<unsigned char>(c));
    return out;
}

Charset charset_from_name(std::string_view name)
{
    const std::string n = ascii_lower(trim(name));
    if (n == "utf-8" || n == "utf8")
        return Charset::utf8;
    if (n == "iso-8859-1" || n == "iso_8859-1" || n == "iso8859-1" || n == "latin1" || n == "latin-1" ||
        n == "l1" || n == "cp819" || n == "ibm819")
        return Charset::latin1;
    if (n == "us-ascii" || n == "ascii" || n == "ansi_x3.4-1968")
        return Charset::ascii;
    return Charset::unknown;
}

std::string to_utf8(std::string_view octets, Charset charset)
{
    if (charset == Charset::latin1)
        return latin1_to_utf8(octets);
    return utf8_sanitize(octets);
}

std::size_t utf8_length(std::string_view text)
{
    std::size_t n = 0;
    for (char c : text)
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80)
            ++n;
    return n;
}

std::string_view utf8_prefix(std::string_view text, std::size_t max_chars)
{
    std::size_t chars = 0;
    for (std::size_t i = 0; i < text.size(); ++i)
    {
        if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80)
        {
            if (chars == max_chars)
                return text.substr(0, i);
            ++chars;
        }
    }
    return text;
}

std::string ascii_lower(std::string_view text)
{
    std::string out(text);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z')
            c = static_cast<char>(c - 'A' + 'a');
    return out;
}

bool iequals(std::string_view a, std::string_view b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        char x = a[i], y = b[i];
        if (x >= 'A' && x <= 'Z')
            x = static_cast<char>(x - 'A' + 'a');
        if (y >= 'A' && y <= 'Z')
            y = static_cast<char>(y - 'A' + 'a');
        if (x != y)
            return false;
    }
    return true;
}

bool istarts_with(std::string_view text, std::string_view prefix)
{
    return text.size() >= prefix.size() && iequals(text.substr(0, prefix.size()), prefix);
}

std::string_view trim(std::string_view text)
{
    std::size_t b = 0, e = text.size();
    while (b < e && is_space(text[b]))
        ++b;
    while (e > b && is_space(text[e - 1]))
        --e;
    return text.substr(b, e - b);
}

} // namespace mailbridge::codec
