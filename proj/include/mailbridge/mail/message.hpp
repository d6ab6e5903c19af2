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

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mailbridge/error.hpp"
#include "mailbridge/net/transport.hpp"

namespace mailbridge::mail
{

enum class Protocol
{
    pop3,
    imap,
};

std::string_view to_string(Protocol protocol);

struct MailAccount
{
    Protocol protocol = Protocol::imap;
    std::string host;
    std::uint16_t port = 0;
    std::string username;
    Secret password;
    std::string mailbox = "INBOX";
    net::TlsMode tls = net::TlsMode::none;

    /// Throws config_error when an invariant is broken.
    void validate() const;
    net::Endpoint endpoint() const { return {host, port, tls}; }
};

std::ostream& operator<<(std::ostream& out, const MailAccount& account);

/// One message exactly as the server delivered it.
struct RawMessage
{
    std::string uid;
    std::string bytes;
};

struct Header
{
    std::string name;
    std::string value;
};

/// Envelope fields of a parsed message plus its decoded plain-text body.
struct EmailMessage
{
    std::string uid;
    std::string from;
    std::string to;
    std::string subject;
    std::string date;
    std::string message_id;
    std::string body_text;

    /// Every header in order of appearance, unfolded.
    std::vector<Header> headers;
    bool has_header_separator = true;

    /// First header with the given name (case-insensitive), or empty.
    std::string header(std::string_view name) const;
    bool has_header(std::string_view name) const;
};

inline constexpr std::string_view no_text_content = "[no text content]";

/**
Splits the header block from the body and decodes the envelope fields. Never
throws: input without a blank line is treated as headers only, with a warning.
body_text is left empty; see extract_text_body.
**/
EmailMessage parse_rfc5322(std::string_view raw);

/**
Returns the first text/plain part of the message (depth-first) decoded to
UTF-8, or "[no text content]" when the message carries none. Line endings in
the result are LF.
**/
std::string extract_text_body(std::string_view raw, const EmailMessage& headers);

/// parse_rfc5322 followed by extract_text_body.
EmailMessage parse_message(const RawMessage& raw);

/// RFC 2047 encoded-word decoding for UTF-8, ISO-8859-1 and US-ASCII. Other charsets pass through verbatim.
std::string decode_encoded_words(std::string_view value);

struct ContentType
{
    std::string type = "text";
    std::string subtype = "plain";
    std::vector<std::pair<std::string, std::string>> params;

    std::string param(std::string_view name) const;
};

ContentType parse_content_type(std::string_view value);

/// addr-spec of an address header: the text in the last angle brackets, else the whole value; lowercased.
std::string extract_address(std::string_view header_value);

} // namespace mailbridge::mail
