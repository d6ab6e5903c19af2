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
#include "mailbridge/daemon/state.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "mailbridge/error.hpp"
#include "mailbridge/log.hpp"

namespace mailbridge::daemon
{

namespace
{

constexpr std::string_view component = "state";

bool valid_field(std::string_view field)
{
    return !field.empty() && field.find_first_of("\t\r\n") == std::string_view::npos;
}

} // namespace

std::string_view to_string(Disposition disposition)
{
    switch (disposition)
    {
    case Disposition::forwarded: return "forwarded";
    case Disposition::skipped: return "skipped";
    case Disposition::rejected: return "rejected";
    }
    return "";
}

std::optional<Disposition> disposition_from_string(std::string_view text)
{
    if (text == "forwarded")
        return Disposition::forwarded;
    if (text == "skipped")
        return Disposition::skipped;
    if (text == "rejected")
        return Disposition::rejected;
    return std::nullopt;
}

bool MailboxState::record(const std::string& uid, Disposition disposition)
{
    return processed.emplace(uid, disposition).second;
}

std::vector<std::string> detect_new(MailboxState& state, const std::vector<std::string>& listing)
{
    const std::set<std::string_view> live(listing.begin(), listing.end());
    std::erase_if(state.processed, [&](const auto& entry) { return !live.contains(entry.first); });

    std::vector<std::string> fresh;
    for (const auto& uid : listing)
        if (!state.contains(uid))
            fresh.push_back(uid);
    return fresh;
}

StateSet load_state(const std::filesystem::path& path)
{
    StateSet states;
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        std::error_code ec;
        if (std::filesystem::exists(path, ec))
            throw Error(ErrorKind::io_error, "cannot read state file " + path.string());
        return states;
    }

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;

        std::vector<std::string_view> fields;
        std::string_view rest = line;
        while (true)
        {
            const auto tab = rest.find('\t');
            fields.push_back(rest.substr(0, tab));
            if (tab == std::string_view::npos)
                break;
            rest.remove_prefix(tab + 1);
        }
        const auto disposition = fields.size() == 3 ? disposition_from_string(fields[2]) : std::nullopt;
        if (!disposition || fields[0].empty() || fields[1].empty())
        {
            log::warning(component, path.string() + ":" + std::to_string(line_no) + ": skipping malformed record");
            continue;
        }
        auto& state = states[std::string(fields[0])];
        state.account_id = std::string(fields[0]);
        if (!state.record(std::string(fields[1]), *disposition))
            log::warning(component,
                         path.string() + ":" + std::to_string(line_no) + ": duplicate uid, keeping the first record");
    }
    return states;
}

void save_state(const std::filesystem::path& path, const StateSet& states)
{
    std::string content;
    for (const auto& [account_id, state] : states)
    {
        if (!valid_field(account_id))
            throw Error(ErrorKind::io_error, "account id '" + account_id + "' cannot be stored in the state file");
        for (const auto& [uid, disposition] : state.processed)
        {
            if (!valid_field(uid))
                throw Error(ErrorKind::io_error, "uid '" + uid + "' cannot be stored in the state file");
            content.append(account_id).append("\t").append(uid).append("\t").append(to_string(disposition));
            content.push_back('\n');
        }
    }

    std::filesystem::path tmp = path;
    tmp += ".tmp";
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0600);
    if (fd < 0)
        throw Error(ErrorKind::io_error, "cannot write " + tmp.string() + ": " + std::strerror(errno));
    std::string_view remaining = content;
    while (!remaining.empty())
    {
        const ssize_t n = ::write(fd, remaining.data(), remaining.size());
        if (n < 0)
        {
            if (errno == EINTR)
                continue;
            const int err = errno;
            ::close(fd);
            throw Error(ErrorKind::io_error, "cannot write " + tmp.string() + ": " + std::strerror(err));
        }
        remaining.remove_prefix(static_cast<std::size_t>(n));
    }
    if (::fsync(fd) != 0 || ::close(fd) != 0)
        throw Error(ErrorKind::io_error, "cannot flush " + tmp.string() + ": " + std::strerror(errno));

    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw Error(ErrorKind::io_error, "cannot replace " + path.string() + ": " + ec.message());
}

} // namespace mailbridge::daemon
