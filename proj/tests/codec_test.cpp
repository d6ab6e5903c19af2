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
#include "doctest.h"

#include "mailbridge/codec.hpp"
#include "support.hpp"

using namespace mailbridge;

TEST_CASE("base64 agrees with openssl")
{
    std::mt19937 rng(7);
    for (int i = 0; i < 100; ++i)
    {
        std::string octets(rng() % 40, '\0');
        for (auto& c : octets)
            c = static_cast<char>(rng());
        const std::string encoded = test::openssl_base64(octets);
        CHECK(codec::base64_encode(octets) == encoded);
        CHECK(codec::base64_decode(encoded) == octets);
    }
}

TEST_CASE("base64 decode is lenient about line breaks")
{
    CHECK(codec::base64_decode("aGVs\r\nbG8=") == "hello");
    CHECK(codec::base64_decode("aGVsbG8") == "hello");
}

TEST_CASE("quoted-printable")
{
    // E2 82 AC is the UTF-8 encoding of U+20AC
    CHECK(codec::quoted_printable_decode("=E2=82=AC") == "\xE2\x82\xAC");
    CHECK(codec::quoted_printable_decode("soft=\r\nbreak") == "softbreak");
    CHECK(codec::quoted_printable_decode("soft=\nbreak") == "softbreak");
    CHECK(codec::quoted_printable_decode("a=3Db") == "a=b");
    CHECK(codec::quoted_printable_decode("bad=ZZ") == "bad=ZZ");
    CHECK(codec::quoted_printable_decode("trailing=") == "trailing");
    CHECK(codec::q_decode("a_b=20c") == "a b c");
}

TEST_CASE("utf8 sanitize replaces invalid bytes")
{
    CHECK(codec::utf8_sanitize("ok") == "ok");
    CHECK(codec::utf8_sanitize("a\xFF" "b") == "a\xEF\xBF\xBD" "b");
    CHECK(codec::utf8_sanitize("\xC3") == "\xEF\xBF\xBD");
    CHECK(codec::utf8_sanitize("\xED\xA0\x80") == "\xEF\xBF\xBD\xEF\xBF\xBD\xEF\xBF\xBD");
    CHECK(codec::is_valid_utf8("\xE2\x82\xAC"));
    CHECK_FALSE(codec::is_valid_utf8("\xC0\xAF"));

    std::mt19937 rng(11);
    for (int i = 0; i < 200; ++i)
    {
        std::string octets(rng() % 64, '\0');
        for (auto& c : octets)
            c = static_cast<char>(rng());
        CHECK(codec::is_valid_utf8(codec::utf8_sanitize(octets)));
    }
}

TEST_CASE("charsets")
{
    CHECK(codec::latin1_to_utf8("caf\xE9") == "caf\xC3\xA9");
    CHECK(codec::charset_from_name("ISO-8859-1") == codec::Charset::latin1);
    CHECK(codec::charset_from_name("utf8") == codec::Charset::utf8);
    CHECK(codec::charset_from_name("us-ascii") == codec::Charset::ascii);
    CHECK(codec::charset_from_name("koi8-r") == codec::Charset::unknown);
    CHECK(codec::to_utf8("\xE9", codec::Charset::unknown) == "\xEF\xBF\xBD");
}

TEST_CASE("utf8 length and prefix")
{
    const std::string text = "a\xE2\x82\xAC" "b";
    CHECK(codec::utf8_length(text) == 3);
    CHECK(codec::utf8_prefix(text, 2) == "a\xE2\x82\xAC");
    CHECK(codec::utf8_prefix(text, 1) == "a");
    CHECK(codec::utf8_prefix(text, 10) == text);
}

TEST_CASE("string helpers")
{
    CHECK(codec::ascii_lower("MiXeD") == "mixed");
    CHECK(codec::iequals("Subject", "SUBJECT"));
    CHECK(codec::istarts_with("user: x", "USER:"));
    CHECK(codec::trim("  a b \t") == "a b");
}
