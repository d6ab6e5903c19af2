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
#include "mailbridge/testkit/mock_mail.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "mailbridge/codec.hpp"

namespace mailbridge::testkit
{

namespace
{

constexpr std::string_view malformed_line = "!!malformed response!!\r\n";

std::string upper(std::string_view text)
{
    std::string out(text);
    for (char& c : out)
        if (c >= 'a' && c <= 'z')
            c = static_cast<char>(c - 'a' + 'A');
    return out;
}

/// Writes replies, applying the malformed-line fault by step number.
class Replier
{
public:
    Replier(net::Transport& out, const FaultPlan& faults) : out_(out), faults_(faults) {}

    void send(std::size_t step, std::string_view reply)
    {
        if (faults_.malformed_at_step && *faults_.malformed_at_step == step)
            out_.write_all(malformed_line);
        else
            out_.write_all(reply);
    }

private:
    net::Transport& out_;
    const FaultPlan& faults_;
};

// POP3 multi-line body with byte-stuffing and the terminating dot.
std::string stuffed(std::string_view bytes)
{
    std::string out;
    out.reserve(bytes.size() + 16);
    std::size_t pos = 0;
    while (pos < bytes.size())
    {
        auto end = bytes.find("\r\n", pos);
        const bool last = end == std::string_view::npos;
        if (last)
            end = bytes.size();
        const std::string_view line = bytes.substr(pos, end - pos);
        if (line.starts_with('.'))
            out.push_back('.');
        out.append(line).append("\r\n");
        pos = last ? bytes.size() : end + 2;
    }
    out.append(".\r\n");
    return out;
}

// IMAP arguments: atoms and quoted strings.
std::vector<std::string> imap_args(std::string_view text)
{
    std::vector<std::string> args;
    std::size_t i = 0;
    while (i < text.size())
    {
        while (i < text.size() && text[i] == ' ')
            ++i;
        if (i >= text.size())
            break;
        std::string arg;
        if (text[i] == '"')
        {
            ++i;
            while (i < text.size() && text[i] != '"')
            {
                if (text[i] == '\\' && i + 1 < text.size())
                    ++i;
                arg.push_back(text[i++]);
            }
            ++i;
        }
        else if (text[i] == '(')
        {
            const auto close = text.find(')', i);
            const auto end = close == std::string_view::npos ? text.size() : close + 1;
            arg = std::string(text.substr(i, end - i));
            i = end;
        }
        else
        {
            while (i < text.size() && text[i] != ' ')
                arg.push_back(text[i++]);
        }
        args.push_back(std::move(arg));
    }
    return args;
}

bool in_uid_set(std::string_view set, unsigned long uid, unsigned long max_uid)
{
    const auto value = [&](std::string_view token) -> unsigned long {
        if (token == "*")
            return max_uid;
        try
        {
            return std::stoul(std::string(token));
        }
        catch (...)
        {
            return 0;
        }
    };
    std::size_t pos = 0;
    while (pos <= set.size())
    {
        const auto comma = set.find(',', pos);
        const std::string_view part = set.substr(pos, comma == std::string_view::npos ? set.npos : comma - pos);
        const auto colon = part.find(':');
        if (colon == std::string_view::npos)
        {
            if (value(part) == uid)
                return true;
        }
        else
        {
            auto lo = value(part.substr(0, colon));
            auto hi = value(part.substr(colon + 1));
            if (lo > hi)
                std::swap(lo, hi);
            if (uid >= lo && uid <= hi)
                return true;
        }
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    return false;
}

} // namespace

mail::RawMessage make_message(std::string uid, std::string_view from, std::string_view to, std::string_view subject,
                              std::string_view body)
{
    std::string bytes;
    bytes.append("From: ").append(from).append("\r\n");
    bytes.append("To: ").append(to).append("\r\n");
    bytes.append("Subject: ").append(subject).append("\r\n");
    bytes.append("Date: Mon, 1 Jun 2026 12:00:00 +0000\r\n");
    bytes.append("Message-ID: <").append(uid).append("@mock.example>\r\n");
    bytes.append("\r\n");
    std::size_t pos = 0;
    while (pos < body.size())
    {
        auto nl = body.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = body.size();
        std::string_view line = body.substr(pos, nl - pos);
        if (line.ends_with('\r'))
            line.remove_suffix(1);
        bytes.append(line).append("\r\n");
        pos = nl + 1;
    }
    return {std::move(uid), std::move(bytes)};
}

MockMailServer::MockMailServer(mail::Protocol protocol, std::vector<mail::RawMessage> mailbox, FaultPlan faults)
    : protocol_(protocol), faults_(faults)
{
    for (auto& m : mailbox)
        plant(std::move(m));
    listener_ = std::make_unique<Listener>([this](net::Transport& t) {
        if (protocol_ == mail::Protocol::pop3)
            serve_pop3(t);
        else
            serve_imap(t);
    });
}

MockMailServer::~MockMailServer()
{
    listener_->stop();
}

mail::MailAccount MockMailServer::account() const
{
    mail::MailAccount account;
    account.protocol = protocol_;
    account.host = "127.0.0.1";
    account.port = port();
    std::lock_guard lock(mutex_);
    account.username = username_;
    account.password = Secret(password_);
    return account;
}

void MockMailServer::plant(mail::RawMessage message)
{
    if (protocol_ == mail::Protocol::imap &&
        (message.uid.empty() || message.uid.find_first_not_of("0123456789") != std::string::npos))
        throw std::invalid_argument("IMAP mock uids must be decimal: " + message.uid);
    std::lock_guard lock(mutex_);
    for (const auto& s : mailbox_)
        if (s.message.uid == message.uid)
            throw std::invalid_argument("duplicate uid " + message.uid);
    mailbox_.push_back({std::move(message), false});
}

std::vector<mail::RawMessage> MockMailServer::mailbox() const
{
    std::lock_guard lock(mutex_);
    std::vector<mail::RawMessage> out;
    for (const auto& s : mailbox_)
        out.push_back(s.message);
    return out;
}

std::vector<Exchange> MockMailServer::transcript() const
{
    std::lock_guard lock(mutex_);
    return transcript_;
}

std::vector<std::string> MockMailServer::commands() const
{
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& e : transcript_)
        out.push_back(e.command);
    return out;
}

void MockMailServer::clear_transcript()
{
    std::lock_guard lock(mutex_);
    transcript_.clear();
}

void MockMailServer::set_faults(FaultPlan faults)
{
    std::lock_guard lock(mutex_);
    faults_ = faults;
}

void MockMailServer::set_credentials(std::string username, std::string password)
{
    std::lock_guard lock(mutex_);
    username_ = std::move(username);
    password_ = std::move(password);
}

void MockMailServer::record(std::string command, std::string response)
{
    std::lock_guard lock(mutex_);
    transcript_.push_back({std::move(command), std::move(response)});
}

void MockMailServer::serve_pop3(net::Transport& transport)
{
    FaultPlan faults;
    std::string username, password;
    {
        std::lock_guard lock(mutex_);
        faults = faults_;
        username = username_;
        password = password_;
    }
    if (faults.close_immediately)
        return;

    const std::string greeting = "+OK mock POP3 ready\r\n";
    std::optional<std::size_t> budget = faults.close_after_octets;
    if (faults.close_after_banner)
        budget = greeting.size();
    ServerTransport out(transport, budget);
    Replier reply(out, faults);
    net::StreamReader in(transport);

    reply.send(0, greeting);

    std::string given_user;
    bool authed = false;
    std::vector<mail::RawMessage> snapshot;
    std::vector<bool> deleted;

    const auto message_at = [&](const std::string& arg) -> std::optional<std::size_t> {
        try
        {
            const std::size_t n = std::stoul(arg);
            if (n >= 1 && n <= snapshot.size() && !deleted[n - 1])
                return n - 1;
        }
        catch (...)
        {
        }
        return std::nullopt;
    };

    for (std::size_t step = 1;; ++step)
    {
        const std::string line = in.read_line();
        const auto sp = line.find(' ');
        const std::string verb = upper(line.substr(0, sp));
        const std::string arg = sp == std::string::npos ? "" : std::string(codec::trim(line.substr(sp + 1)));
        std::string status;
        std::string body;
        bool quit = false;

        if (verb == "USER")
        {
            given_user = arg;
            status = "+OK";
        }
        else if (verb == "PASS")
        {
            if (given_user == username && arg == password)
            {
                authed = true;
                std::lock_guard lock(mutex_);
                for (const auto& s : mailbox_)
                    snapshot.push_back(s.message);
                deleted.assign(snapshot.size(), false);
                status = "+OK maildrop locked";
            }
            else
                status = "-ERR invalid credentials";
        }
        else if (verb == "QUIT")
        {
            if (authed)
            {
                std::lock_guard lock(mutex_);
                for (std::size_t i = 0; i < snapshot.size(); ++i)
                    if (deleted[i])
                        std::erase_if(mailbox_, [&](const Stored& s) { return s.message.uid == snapshot[i].uid; });
            }
            status = "+OK bye";
            quit = true;
        }
        else if (!authed)
            status = "-ERR authenticate first";
        else if (verb == "STAT")
        {
            std::size_t count = 0, total = 0;
            for (std::size_t i = 0; i < snapshot.size(); ++i)
                if (!deleted[i])
                {
                    ++count;
                    total += snapshot[i].bytes.size();
                }
            status = "+OK " + std::to_string(count) + " " + std::to_string(total);
        }
        else if (verb == "UIDL" || verb == "LIST")
        {
            const auto field = [&](std::size_t i) {
                return verb == "UIDL" ? snapshot[i].uid : std::to_string(snapshot[i].bytes.size());
            };
            if (!arg.empty())
            {
                const auto i = message_at(arg);
                status = i ? "+OK " + std::to_string(*i + 1) + " " + field(*i) : "-ERR no such message";
            }
            else
            {
                status = "+OK";
                for (std::size_t i = 0; i < snapshot.size(); ++i)
                    if (!deleted[i])
                        body += std::to_string(i + 1) + " " + field(i) + "\r\n";
                body += ".\r\n";
            }
        }
        else if (verb == "RETR")
        {
            if (const auto i = message_at(arg))
            {
                status = "+OK " + std::to_string(snapshot[*i].bytes.size()) + " octets";
                body = stuffed(snapshot[*i].bytes);
            }
            else
                status = "-ERR no such message";
        }
        else if (verb == "DELE")
        {
            if (const auto i = message_at(arg))
            {
                deleted[*i] = true;
                status = "+OK deleted";
            }
            else
                status = "-ERR no such message";
        }
        else if (verb == "RSET")
        {
            deleted.assign(snapshot.size(), false);
            status = "+OK";
        }
        else if (verb == "NOOP")
            status = "+OK";
        else
            status = "-ERR unknown command";

        record(verb == "PASS" ? "PASS ***" : line, status);
        reply.send(step, status + "\r\n" + body);
        if (quit)
            return;
    }
}

void MockMailServer::serve_imap(net::Transport& transport)
{
    FaultPlan faults;
    std::string username, password;
    {
        std::lock_guard lock(mutex_);
        faults = faults_;
        username = username_;
        password = password_;
    }
    if (faults.close_immediately)
        return;

    const std::string greeting = "* OK [CAPABILITY IMAP4rev1] mock IMAP ready\r\n";
    std::optional<std::size_t> budget = faults.close_after_octets;
    if (faults.close_after_banner)
        budget = greeting.size();
    ServerTransport out(transport, budget);
    Replier reply(out, faults);
    net::StreamReader in(transport);

    reply.send(0, greeting);

    bool authed = false;
    bool selected = false;

    for (std::size_t step = 1;; ++step)
    {
        const std::string line = in.read_line();
        const auto sp = line.find(' ');
        if (sp == std::string::npos)
        {
            record(line, "* BAD");
            reply.send(step, "* BAD missing command\r\n");
            continue;
        }
        const std::string tag = line.substr(0, sp);
        const std::vector<std::string> args = imap_args(std::string_view(line).substr(sp + 1));
        const std::string verb = args.empty() ? "" : upper(args[0]);
        std::string untagged;
        std::string status;
        bool logout = false;

        if (verb == "LOGIN")
        {
            if (args.size() == 3 && args[1] == username && args[2] == password)
            {
                authed = true;
                status = "OK LOGIN completed";
            }
            else
                status = "NO [AUTHENTICATIONFAILED] invalid credentials";
        }
        else if (verb == "LOGOUT")
        {
            untagged = "* BYE mock IMAP closing\r\n";
            status = "OK LOGOUT completed";
            logout = true;
        }
        else if (verb == "NOOP")
            status = "OK NOOP completed";
        else if (!authed)
            status = "NO not authenticated";
        else if (verb == "SELECT")
        {
            if (args.size() == 2 && codec::iequals(args[1], "INBOX"))
            {
                std::lock_guard lock(mutex_);
                selected = true;
                untagged = "* " + std::to_string(mailbox_.size()) + " EXISTS\r\n* OK [UIDVALIDITY 1] UIDs valid\r\n";
                status = "OK [READ-WRITE] SELECT completed";
            }
            else
                status = "NO no such mailbox";
        }
        else if (!selected)
            status = "BAD no mailbox selected";
        else if (verb == "EXPUNGE")
        {
            std::lock_guard lock(mutex_);
            for (std::size_t i = 0; i < mailbox_.size();)
            {
                if (mailbox_[i].flagged_deleted)
                {
                    untagged += "* " + std::to_string(i + 1) + " EXPUNGE\r\n";
                    mailbox_.erase(mailbox_.begin() + static_cast<std::ptrdiff_t>(i));
                }
                else
                    ++i;
            }
            status = "OK EXPUNGE completed";
        }
        else if (verb == "UID" && args.size() >= 2)
        {
            const std::string sub = upper(args[1]);
            std::lock_guard lock(mutex_);
            unsigned long max_uid = 0;
            for (const auto& s : mailbox_)
                max_uid = std::max(max_uid, std::stoul(s.message.uid));

            if (sub == "SEARCH" && args.size() == 3 && upper(args[2]) == "ALL")
            {
                untagged = "* SEARCH";
                for (const auto& s : mailbox_)
                    untagged += " " + s.message.uid;
                untagged += "\r\n";
                status = "OK SEARCH completed";
            }
            else if (sub == "FETCH" && args.size() == 4)
            {
                const std::string items = upper(args[3]);
                const bool want_size = items.find("RFC822.SIZE") != std::string::npos;
                const bool want_body = items.find("RFC822 ") != std::string::npos ||
                                       items.find("RFC822)") != std::string::npos || items == "RFC822";
                for (std::size_t i = 0; i < mailbox_.size(); ++i)
                {
                    const auto& m = mailbox_[i].message;
                    if (!in_uid_set(args[2], std::stoul(m.uid), max_uid))
                        continue;
                    untagged += "* " + std::to_string(i + 1) + " FETCH (UID " + m.uid;
                    if (want_size)
                        untagged += " RFC822.SIZE " + std::to_string(m.bytes.size());
                    if (want_body)
                        untagged += " RFC822 {" + std::to_string(m.bytes.size()) + "}\r\n" + m.bytes;
                    untagged += ")\r\n";
                }
                status = "OK FETCH completed";
            }
            else if (sub == "STORE" && args.size() == 5 && upper(args[3]) == "+FLAGS" &&
                     upper(args[4]) == "(\\DELETED)")
            {
                for (std::size_t i = 0; i < mailbox_.size(); ++i)
                {
                    if (!in_uid_set(args[2], std::stoul(mailbox_[i].message.uid), max_uid))
                        continue;
                    mailbox_[i].flagged_deleted = true;
                    untagged += "* " + std::to_string(i + 1) + " FETCH (UID " + mailbox_[i].message.uid +
                                " FLAGS (\\Deleted))\r\n";
                }
                status = "OK STORE completed";
            }
            else
                status = "BAD unsupported UID command";
        }
        else
            status = "BAD unknown command";

        const std::string tagged = tag + " " + status;
        std::string command = line;
        if (verb == "LOGIN")
            command = tag + " LOGIN ***";
        record(command, tagged);
        reply.send(step, untagged + tagged + "\r\n");
        if (logout)
            return;
    }
}

} // namespace mailbridge::testkit
