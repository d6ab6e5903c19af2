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
#include "mailbridge/mail/message.hpp"

#include "mailbridge/codec.hpp"
#include "mailbridge/log.hpp"

namespace mailbridge::mail
{

namespace
{

constexpr std::string_view component = "mail";
constexpr int max_mime_depth = 16;

struct Entity
{
    std::vector<Header> headers;
    std::string_view body;
    bool has_separator = false;
};

std::string_view find_header(const std::vector<Header>& headers, std::string_view name)
{
    for (const auto& h : headers)
        if (codec::iequals(h.name, name))
            return h.value;
    return {};
}

// Next line of `text` starting at `pos`, without its terminator. Advances `pos` past the terminator.
std::string_view next_line(std::string_view text, std::size_t& pos)
{
    const std::size_t start = pos;
    const std::size_t nl = text.find('\n', start);
    std::size_t end;
    if (nl == std::string_view::npos)
    {
        end = text.size();
        pos = text.size();
    }
    else
    {
        end = nl;
        pos = nl + 1;
    }
    if (end > start && text[end - 1] == '\r')
        --end;
    return text.substr(start, end - start);
}

bool valid_header_name(std::string_view name)
{
    if (name.empty())
        return false;
    for (char c : name)
        if (static_cast<unsigned char>(c) <= 32 || static_cast<unsigned char>(c) >= 127)
            return false;
    return true;
}

Entity split_entity(std::string_view raw)
{
    Entity entity;
    std::size_t pos = 0;
    std::size_t skipped = 0;
    bool first = true;
    while (pos < raw.size())
    {
        std::string_view line = next_line(raw, pos);
        if (line.empty())
        {
            entity.has_separator = true;
            entity.body = raw.substr(pos);
            return entity;
        }
        // mbox envelope line
        if (first && line.starts_with("From "))
        {
            first = false;
            continue;
        }
        first = false;
        if (codec::is_wsp(line.front()))
        {
            if (entity.headers.empty())
            {
                ++skipped;
                continue;
            }
            auto& value = entity.headers.back().value;
            const auto folded = codec::trim(line);
            if (!folded.empty())
            {
                if (!value.empty())
                    value.push_back(' ');
                value.append(folded);
            }
            continue;
        }
        const auto colon = line.find(':');
        if (colon == std::string_view::npos)
        {
            ++skipped;
            continue;
        }
        std::string_view name = line.substr(0, colon);
        while (!name.empty() && codec::is_wsp(name.back()))
            name.remove_suffix(1);
        if (!valid_header_name(name))
        {
            ++skipped;
            continue;
        }
        entity.headers.push_back({std::string(name), std::string(codec::trim(line.substr(colon + 1)))});
    }
    if (skipped > 0)
        log::debug(component, "ignored " + std::to_string(skipped) + " malformed header line(s)");
    return entity;
}

// Stray CR or LF left after unfolding become spaces.
std::string single_line(std::string value)
{
    for (char& c : value)
        if (c == '\r' || c == '\n')
            c = ' ';
    return value;
}

std::string decode_transfer(std::string_view body, std::string_view encoding)
{
    const std::string enc = codec::ascii_lower(codec::trim(encoding));
    if (enc == "base64")
        return codec::base64_decode(body);
    if (enc == "quoted-printable")
        return codec::quoted_printable_decode(body);
    return std::string(body);
}

std::string to_lf(std::string text)
{
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i)
    {
        if (text[i] == '\r')
        {
            out.push_back('\n');
            if (i + 1 < text.size() && text[i + 1] == '\n')
                ++i;
        }
        else
            out.push_back(text[i]);
    }
    return out;
}

std::string decode_text(const Entity& entity, const ContentType& type)
{
    const std::string octets = decode_transfer(entity.body, find_header(entity.headers, "Content-Transfer-Encoding"));
    const auto charset = codec::charset_from_name(type.param("charset"));
    return to_lf(codec::to_utf8(octets, charset));
}

// Splits a multipart body on its boundary. Returns false when no delimiter line is present.
bool split_multipart(std::string_view body, std::string_view boundary, std::vector<std::string_view>& parts)
{
    const std::string delimiter = "--" + std::string(boundary);
    std::size_t pos = 0;
    std::size_t part_start = std::string_view::npos;
    bool seen = false;
    while (pos < body.size())
    {
        const std::size_t line_start = pos;
        const std::string_view line = next_line(body, pos);
        if (!line.starts_with(delimiter))
            continue;
        std::string_view rest = line.substr(delimiter.size());
        const bool closing = rest.starts_with("--");
        if (closing)
            rest.remove_prefix(2);
        if (!codec::trim(rest).empty())
            continue;

        seen = true;
        if (part_start != std::string_view::npos)
        {
            // the line break before a delimiter belongs to the delimiter
            std::size_t end = line_start;
            if (end > part_start && body[end - 1] == '\n')
                --end;
            if (end > part_start && body[end - 1] == '\r')
                --end;
            parts.push_back(body.substr(part_start, end - part_start));
        }
        if (closing)
            return true;
        part_start = pos;
    }
    if (part_start != std::string_view::npos && part_start < body.size())
        parts.push_back(body.substr(part_start));
    return seen;
}

std::optional<std::string> find_text_plain(const Entity& entity, int depth, bool top_level)
{
    if (depth > max_mime_depth)
    {
        log::warning(component, "MIME nesting too deep, ignoring inner parts");
        return std::nullopt;
    }
    const std::string_view content_type = find_header(entity.headers, "Content-Type");
    const ContentType type = parse_content_type(content_type);

    if (type.type == "multipart")
    {
        const std::string boundary = type.param("boundary");
        std::vector<std::string_view> parts;
        if (boundary.empty() || !split_multipart(entity.body, boundary, parts))
        {
            log::warning(component, "malformed multipart boundary, treating body as plain text");
            return decode_text(entity, ContentType{});
        }
        for (const auto part : parts)
        {
            const Entity child = split_entity(part);
            // a part without headers is text/plain by default
            const Entity effective = child.has_separator ? child : Entity{{}, part, false};
            if (auto text = find_text_plain(effective, depth + 1, false))
                return text;
        }
        return std::nullopt;
    }
    if ((type.type == "text" && type.subtype == "plain") || (top_level && content_type.empty()))
        return decode_text(entity, type);
    return std::nullopt;
}

} // namespace

std::string_view to_string(Protocol protocol)
{
    return protocol == Protocol::pop3 ? "pop3" : "imap";
}

void MailAccount::validate() const
{
    if (host.empty())
        throw Error(ErrorKind::config_error, "mail account host is empty");
    if (port == 0)
        throw Error(ErrorKind::config_error, "mail account port must be nonzero");
    if (protocol == Protocol::imap && mailbox.empty())
        throw Error(ErrorKind::config_error, "IMAP mailbox name is empty");
}

std::ostream& operator<<(std::ostream& out, const MailAccount& account)
{
    return out << to_string(account.protocol) << "://" << account.username << ":" << redacted << "@" << account.host
               << ":" << account.port << "/" << account.mailbox;
}

std::string EmailMessage::header(std::string_view name) const
{
    return std::string(find_header(headers, name));
}

bool EmailMessage::has_header(std::string_view name) const
{
    for (const auto& h : headers)
        if (codec::iequals(h.name, name))
            return true;
    return false;
}

std::string ContentType::param(std::string_view name) const
{
    for (const auto& [key, value] : params)
        if (key == codec::ascii_lower(name))
            return value;
    return {};
}

ContentType parse_content_type(std::string_view value)
{
    ContentType result;
    value = codec::trim(value);
    if (value.empty())
        return result;

    const auto semi = value.find(';');
    const std::string_view media = codec::trim(value.substr(0, semi));
    const auto slash = media.find('/');
    if (slash != std::string_view::npos)
    {
        result.type = codec::ascii_lower(codec::trim(media.substr(0, slash)));
        result.subtype = codec::ascii_lower(codec::trim(media.substr(slash + 1)));
    }
    else
    {
        result.type = codec::ascii_lower(media);
        result.subtype.clear();
    }
    if (semi == std::string_view::npos)
        return result;

    std::size_t i = semi + 1;
    while (i < value.size())
    {
        while (i < value.size() && (codec::is_space(value[i]) || value[i] == ';'))
            ++i;
        const std::size_t name_start = i;
        while (i < value.size() && value[i] != '=' && value[i] != ';')
            ++i;
        const std::string name = codec::ascii_lower(codec::trim(value.substr(name_start, i - name_start)));
        if (i >= value.size() || value[i] != '=')
            continue;
        ++i;
        while (i < value.size() && codec::is_wsp(value[i]))
            ++i;
        std::string param_value;
        if (i < value.size() && value[i] == '"')
        {
            ++i;
            while (i < value.size() && value[i] != '"')
            {
                if (value[i] == '\\' && i + 1 < value.size())
                    ++i;
                param_value.push_back(value[i]);
                ++i;
            }
            ++i;
        }
        else
        {
            const std::size_t start = i;
            while (i < value.size() && value[i] != ';')
                ++i;
            param_value = std::string(codec::trim(value.substr(start, i - start)));
        }
        if (!name.empty())
            result.params.emplace_back(name, std::move(param_value));
    }
    return result;
}

std::string decode_encoded_words(std::string_view value)
{
    std::string out;
    std::size_t i = 0;
    bool previous_was_word = false;

    while (i < value.size())
    {
        const auto start = value.find("=?", i);
        if (start == std::string_view::npos)
        {
            out.append(value.substr(i));
            break;
        }
        // =?charset?enc?text?=
        const auto q1 = value.find('?', start + 2);
        const auto q2 = q1 == std::string_view::npos ? q1 : value.find('?', q1 + 1);
        const auto end = q2 == std::string_view::npos ? q2 : value.find("?=", q2 + 1);
        if (end == std::string_view::npos || q2 != q1 + 2)
        {
            out.append(value.substr(i, start + 2 - i));
            i = start + 2;
            previous_was_word = false;
            continue;
        }
        const std::string_view gap = value.substr(i, start - i);
        std::string_view charset_name = value.substr(start + 2, q1 - start - 2);
        const char encoding = value[q1 + 1];
        const std::string_view payload = value.substr(q2 + 1, end - q2 - 1);

        bool malformed = payload.find_first_of(" \t") != std::string_view::npos ||
                         (encoding != 'Q' && encoding != 'q' && encoding != 'B' && encoding != 'b');
        if (const auto star = charset_name.find('*'); star != std::string_view::npos)
            charset_name = charset_name.substr(0, star);
        const auto charset = codec::charset_from_name(charset_name);
        if (malformed || charset == codec::Charset::unknown)
        {
            // verbatim pass-through
            out.append(value.substr(i, end + 2 - i));
            i = end + 2;
            previous_was_word = false;
            continue;
        }

        // whitespace between two adjacent encoded words is dropped
        if (!(previous_was_word && codec::trim(gap).empty()))
            out.append(gap);
        const std::string octets =
            (encoding == 'B' || encoding == 'b') ? codec::base64_decode(payload) : codec::q_decode(payload);
        out.append(codec::to_utf8(octets, charset));
        i = end + 2;
        previous_was_word = true;
    }
    return out;
}

std::string extract_address(std::string_view header_value)
{
    const auto close = header_value.rfind('>');
    if (close != std::string_view::npos)
    {
        const auto open = header_value.rfind('<', close);
        if (open != std::string_view::npos)
            return codec::ascii_lower(codec::trim(header_value.substr(open + 1, close - open - 1)));
    }
    return codec::ascii_lower(codec::trim(header_value));
}

EmailMessage parse_rfc5322(std::string_view raw)
{
    EmailMessage msg;
    const Entity entity = split_entity(raw);
    msg.has_header_separator = entity.has_separator;
    if (!entity.has_separator)
        log::warning(component, "message has no header/body separator; treating it as headers only");

    msg.headers.reserve(entity.headers.size());
    for (const auto& h : entity.headers)
        msg.headers.push_back({codec::utf8_sanitize(h.name), codec::utf8_sanitize(h.value)});

    const auto field = [&](std::string_view name) { return single_line(std::string(find_header(msg.headers, name))); };
    msg.subject = single_line(codec::utf8_sanitize(decode_encoded_words(find_header(entity.headers, "Subject"))));
    msg.from = single_line(codec::utf8_sanitize(decode_encoded_words(find_header(entity.headers, "From"))));
    msg.to = field("To");
    msg.date = field("Date");
    msg.message_id = field("Message-ID");
    return msg;
}

std::string extract_text_body(std::string_view raw, const EmailMessage&)
{
    const Entity entity = split_entity(raw);
    if (!entity.has_separator)
        return {};
    if (auto text = find_text_plain(entity, 0, true))
        return *text;
    return std::string(no_text_content);
}

EmailMessage parse_message(const RawMessage& raw)
{
    EmailMessage msg = parse_rfc5322(raw.bytes);
    msg.uid = raw.uid;
    msg.body_text = extract_text_body(raw.bytes, msg);
    return msg;
}

} // namespace mailbridge::mail
