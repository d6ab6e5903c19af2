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
#include <charconv>
#include <cstring>
#include <optional>
#include <cstdio>
#include <unordered_map>

#include "mailbridge/codec.hpp"
#include "mailbridge/log.hpp"
#include "mailbridge/mail/session.hpp"

namespace mailbridge::mail
{

namespace
{

constexpr std::size_t max_literal = std::size_t{256} << 20;

// Literal announcement "{N}" or "{N+}" at the end of a response line.
std::optional<std::size_t> trailing_literal(std::string_view line)
{
    if (line.empty() || line.back() != '}')
        return std::nullopt;
    const auto open = line.rfind('{');
    if (open == std::string_view::npos)
        return std::nullopt;
    std::string_view digits = line.substr(open + 1, line.size() - open - 2);
    if (!digits.empty() && digits.back() == '+')
        digits.remove_suffix(1);
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size())
        return std::nullopt;
    return n;
}

// Value of a numeric fetch attribute such as "UID 42" or "RFC822.SIZE 1024".
std::optional<std::string> fetch_attribute(std::string_view line, std::string_view name)
{
    for (std::size_t start = 1; start + name.size() + 1 < line.size(); ++start)
    {
        if (line[start - 1] != '(' && line[start - 1] != ' ')
            continue;
        if (!codec::iequals(line.substr(start, name.size()), name) || line[start + name.size()] != ' ')
            continue;
        const std::size_t begin = start + name.size() + 1;
        std::size_t i = begin;
        while (i < line.size() && line[i] >= '0' && line[i] <= '9')
            ++i;
        if (i > begin)
            return std::string(line.substr(begin, i - begin));
    }
    return std::nullopt;
}

bool is_fetch_response(std::string_view line)
{
    // "* <n> FETCH ("
    std::size_t i = 2;
    const std::size_t digits = i;
    while (i < line.size() && line[i] >= '0' && line[i] <= '9')
        ++i;
    return i > digits && codec::istarts_with(line.substr(i), " FETCH ");
}

// Index of the literal carrying the RFC822 item, counting literal markers in `line`.
std::optional<std::size_t> rfc822_literal_index(std::string_view line)
{
    std::size_t index = 0;
    for (std::size_t i = 0; i < line.size(); ++i)
    {
        if (line[i] == '{' && trailing_literal(line.substr(i, line.find('}', i) - i + 1)))
        {
            const std::string_view before = codec::trim(line.substr(0, i));
            if (before.size() >= 7 && codec::iequals(before.substr(before.size() - 7), " RFC822"))
                return index;
            if (before.size() >= 7 && codec::iequals(before.substr(before.size() - 7), "(RFC822"))
                return index;
            ++index;
        }
    }
    return std::nullopt;
}

} // namespace

std::string imap_quote(std::string_view value)
{
    std::string out = "\"";
    for (char c : value)
    {
        if (c == '\r' || c == '\n')
            throw Error(ErrorKind::config_error, "IMAP strings cannot contain line breaks");
        if (c == '"' || c == '\\')
            out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

ImapSession::ImapSession(std::unique_ptr<net::Transport> transport, const MailAccount& account,
                         SessionOptions options)
    : MailSession(std::move(transport), account, options)
{
    const Untagged greeting = read_response();
    if (!greeting.line.starts_with("* OK") && !greeting.line.starts_with("* PREAUTH"))
        throw Error(ErrorKind::protocol_error, "unexpected IMAP greeting: " + greeting.line);
    if (greeting.line.starts_with("* OK"))
        command("LOGIN " + imap_quote(account_.username) + " " + imap_quote(account_.password.reveal()),
                ErrorKind::auth_failure, true);
    command("SELECT " + imap_quote(account_.mailbox));
}

ImapSession::Untagged ImapSession::read_response()
{
    Untagged response;
    response.line = reader_.read_line();
    while (auto size = trailing_literal(response.line))
    {
        if (*size > max_literal)
            throw Error(ErrorKind::protocol_error, "IMAP literal too large: " + response.line);
        response.literals.push_back(reader_.read_exact(*size));
        response.line.append(reader_.read_line());
    }
    log::debug("mail", "< " + response.line);
    return response;
}

std::vector<ImapSession::Untagged> ImapSession::command(const std::string& line, ErrorKind failure_kind,
                                                        bool sensitive)
{
    char tag[16];
    std::snprintf(tag, sizeof(tag), "A%04u", next_tag_++);
    send_line(std::string(tag) + " " + line, sensitive);

    const std::string verb = line.substr(0, line.find(' '));
    std::vector<Untagged> untagged;
    while (true)
    {
        Untagged response = read_response();
        if (response.line.starts_with("* "))
        {
            if (codec::istarts_with(response.line, "* BYE") && !codec::iequals(verb, "LOGOUT"))
                throw Error(ErrorKind::transport_error, "server closed the session: " + response.line);
            untagged.push_back(std::move(response));
            continue;
        }
        if (response.line.starts_with(tag) && response.line.size() > std::strlen(tag) &&
            response.line[std::strlen(tag)] == ' ')
        {
            const std::string_view status = std::string_view(response.line).substr(std::strlen(tag) + 1);
            if (codec::istarts_with(status, "OK"))
                return untagged;
            if (codec::istarts_with(status, "NO"))
                throw Error(failure_kind, "IMAP " + verb + " failed: " + response.line);
            throw Error(ErrorKind::protocol_error, "IMAP " + verb + " rejected: " + response.line);
        }
        throw Error(ErrorKind::protocol_error, "malformed IMAP response: " + response.line);
    }
}

std::vector<ListEntry> ImapSession::list()
{
    std::vector<std::string> uids;
    for (const auto& response : command("UID SEARCH ALL"))
    {
        if (!codec::istarts_with(response.line, "* SEARCH"))
            continue;
        std::string_view rest = std::string_view(response.line).substr(8);
        while (!rest.empty())
        {
            rest = codec::trim(rest);
            const auto sp = rest.find(' ');
            const std::string_view token = rest.substr(0, sp);
            if (!token.empty())
            {
                if (token.find_first_not_of("0123456789") != std::string_view::npos)
                    throw Error(ErrorKind::protocol_error, "malformed SEARCH response: " + response.line);
                uids.emplace_back(token);
            }
            rest = sp == std::string_view::npos ? std::string_view{} : rest.substr(sp);
        }
    }

    std::unordered_map<std::string, std::size_t> sizes;
    if (!uids.empty())
    {
        for (const auto& response : command("UID FETCH 1:* (UID RFC822.SIZE)"))
        {
            if (!is_fetch_response(response.line))
                continue;
            const auto uid = fetch_attribute(response.line, "UID");
            const auto size = fetch_attribute(response.line, "RFC822.SIZE");
            if (!uid || !size)
                throw Error(ErrorKind::protocol_error, "malformed FETCH response: " + response.line);
            sizes[*uid] = std::stoull(*size);
        }
    }

    std::vector<ListEntry> entries;
    entries.reserve(uids.size());
    listed_.clear();
    for (const auto& uid : uids)
    {
        if (deleted_.contains(uid))
            continue;
        if (!listed_.insert(uid).second)
            throw Error(ErrorKind::protocol_error, "duplicate UID in SEARCH response: " + uid);
        const auto size = sizes.find(uid);
        entries.push_back({uid, size == sizes.end() ? 0 : size->second});
    }
    return entries;
}

RawMessage ImapSession::fetch(const std::string& uid)
{
    require_listed(uid);
    for (const auto& response : command("UID FETCH " + uid + " (RFC822)"))
    {
        if (!is_fetch_response(response.line))
            continue;
        const auto fetched_uid = fetch_attribute(response.line, "UID");
        if (fetched_uid && *fetched_uid != uid)
            continue;
        const auto index = rfc822_literal_index(response.line);
        if (!index || *index >= response.literals.size())
            continue;
        return {uid, response.literals[*index]};
    }
    throw Error(ErrorKind::protocol_error, "server returned no RFC822 data for uid " + uid);
}

void ImapSession::remove(const std::string& uid)
{
    require_delete_enabled();
    if (deleted_.contains(uid))
        return;
    require_listed(uid);
    command("UID STORE " + uid + " +FLAGS (\\Deleted)");
    deleted_.insert(uid);
    listed_.erase(uid);
}

void ImapSession::close()
{
    if (!deleted_.empty())
        command("EXPUNGE");
    command("LOGOUT");
}

} // namespace mailbridge::mail
