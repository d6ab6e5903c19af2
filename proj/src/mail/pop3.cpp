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

#include "mailbridge/codec.hpp"
#include "mailbridge/log.hpp"
#include "mailbridge/mail/session.hpp"

namespace mailbridge::mail
{

namespace
{

std::size_t parse_count(std::string_view token, const std::string& line)
{
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || token.empty())
        throw Error(ErrorKind::protocol_error, "expected a number in POP3 response: " + line);
    return value;
}

// "n token" as sent by UIDL and LIST
std::pair<std::string, std::string> split_pair(const std::string& line)
{
    const std::string_view trimmed = codec::trim(line);
    const auto sp = trimmed.find(' ');
    if (sp == std::string_view::npos)
        throw Error(ErrorKind::protocol_error, "malformed POP3 listing line: " + line);
    const std::string_view second = codec::trim(trimmed.substr(sp + 1));
    if (second.empty() || second.find(' ') != std::string_view::npos)
        throw Error(ErrorKind::protocol_error, "malformed POP3 listing line: " + line);
    return {std::string(trimmed.substr(0, sp)), std::string(second)};
}

} // namespace

Pop3Session::Pop3Session(std::unique_ptr<net::Transport> transport, const MailAccount& account,
                         SessionOptions options)
    : MailSession(std::move(transport), account, options)
{
    const std::string greeting = reader_.read_line();
    if (!greeting.starts_with("+OK"))
        throw Error(ErrorKind::protocol_error, "unexpected POP3 greeting: " + greeting);
    command("USER " + account_.username, ErrorKind::auth_failure);
    command("PASS " + account_.password.reveal(), ErrorKind::auth_failure, true);
}

std::string Pop3Session::command(const std::string& line, ErrorKind failure_kind, bool sensitive)
{
    send_line(line, sensitive);
    std::string response = reader_.read_line();
    log::debug("mail", "< " + response);
    if (response.starts_with("+OK"))
        return response;
    const std::string verb = line.substr(0, line.find(' '));
    if (response.starts_with("-ERR"))
        throw Error(failure_kind, "POP3 " + verb + " refused: " + response);
    throw Error(ErrorKind::protocol_error, "malformed POP3 response to " + verb + ": " + response);
}

std::vector<std::string> Pop3Session::read_multiline()
{
    std::vector<std::string> lines;
    while (true)
    {
        std::string line = reader_.read_line();
        if (line == ".")
            return lines;
        if (line.starts_with('.'))
            line.erase(0, 1);
        lines.push_back(std::move(line));
    }
}

std::pair<std::size_t, std::size_t> Pop3Session::stat()
{
    const std::string response = command("STAT");
    const std::string_view rest = codec::trim(std::string_view(response).substr(3));
    const auto sp = rest.find(' ');
    if (sp == std::string_view::npos)
        throw Error(ErrorKind::protocol_error, "malformed STAT response: " + response);
    const auto count = parse_count(rest.substr(0, sp), response);
    std::string_view total = codec::trim(rest.substr(sp + 1));
    total = total.substr(0, total.find(' '));
    return {count, parse_count(total, response)};
}

std::vector<ListEntry> Pop3Session::list()
{
    command("UIDL");
    std::vector<std::pair<std::string, std::string>> uids;
    for (const auto& line : read_multiline())
        uids.push_back(split_pair(line));

    command("LIST");
    std::unordered_map<std::string, std::size_t> sizes;
    for (const auto& line : read_multiline())
    {
        auto [number, size] = split_pair(line);
        sizes[number] = parse_count(size, line);
    }

    std::vector<ListEntry> entries;
    entries.reserve(uids.size());
    number_of_.clear();
    listed_.clear();
    for (auto& [number, uid] : uids)
    {
        if (deleted_.contains(uid))
            continue;
        if (!listed_.insert(uid).second)
            throw Error(ErrorKind::protocol_error, "duplicate UIDL token: " + uid);
        const auto size = sizes.find(number);
        entries.push_back({uid, size == sizes.end() ? 0 : size->second});
        number_of_[uid] = number;
    }
    return entries;
}

RawMessage Pop3Session::fetch(const std::string& uid)
{
    require_listed(uid);
    command("RETR " + number_of_.at(uid));
    RawMessage message{uid, {}};
    for (const auto& line : read_multiline())
    {
        message.bytes.append(line);
        message.bytes.append("\r\n");
    }
    return message;
}

void Pop3Session::remove(const std::string& uid)
{
    require_delete_enabled();
    if (deleted_.contains(uid))
        return;
    require_listed(uid);
    command("DELE " + number_of_.at(uid));
    deleted_.insert(uid);
    listed_.erase(uid);
}

void Pop3Session::close()
{
    command("QUIT");
}

} // namespace mailbridge::mail
