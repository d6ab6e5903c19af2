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
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "mailbridge/mail/message.hpp"
#include "mailbridge/net/transport.hpp"

namespace mailbridge::mail
{

struct ListEntry
{
    std::string uid;
    std::size_t size = 0;

    friend bool operator==(const ListEntry&, const ListEntry&) = default;
};

struct SessionOptions
{
    /// Deletion is refused with config_error unless this is set.
    bool delete_after_forward = false;
};

/**
An authenticated mailbox session. Owns its transport exclusively. Logging in
(and selecting the mailbox for IMAP) happens on construction.
**/
class MailSession
{
public:
    virtual ~MailSession() = default;

    MailSession(const MailSession&) = delete;
    MailSession& operator=(const MailSession&) = delete;

    /// One entry per message in server order. Messages deleted in this session are omitted.
    virtual std::vector<ListEntry> list() = 0;

    /// Complete message octets. The uid must come from list() in this session.
    virtual RawMessage fetch(const std::string& uid) = 0;

    /// Marks a message deleted; repeated calls for the same uid are no-ops.
    virtual void remove(const std::string& uid) = 0;

    /// Commits deletions and logs out.
    virtual void close() = 0;

protected:
    MailSession(std::unique_ptr<net::Transport> transport, const MailAccount& account, SessionOptions options);

    void send_line(const std::string& line, bool sensitive = false);
    void require_listed(const std::string& uid) const;
    void require_delete_enabled() const;

    std::unique_ptr<net::Transport> transport_;
    net::StreamReader reader_;
    MailAccount account_;
    SessionOptions options_;
    std::set<std::string> listed_;
    std::set<std::string> deleted_;
};

std::unique_ptr<MailSession> open_session(const MailAccount& account, std::unique_ptr<net::Transport> transport,
                                          SessionOptions options = {});

/// POP3 subset: USER, PASS, STAT, UIDL, LIST, RETR, DELE, QUIT.
class Pop3Session : public MailSession
{
public:
    Pop3Session(std::unique_ptr<net::Transport> transport, const MailAccount& account, SessionOptions options = {});

    std::vector<ListEntry> list() override;
    RawMessage fetch(const std::string& uid) override;
    void remove(const std::string& uid) override;
    void close() override;

    /// Message count and total octets as reported by STAT.
    std::pair<std::size_t, std::size_t> stat();

private:
    std::string command(const std::string& line, ErrorKind failure_kind = ErrorKind::protocol_error,
                        bool sensitive = false);
    std::vector<std::string> read_multiline();

    std::unordered_map<std::string, std::string> number_of_;
};

/// IMAP4rev1 subset: LOGIN, SELECT, UID SEARCH ALL, UID FETCH, UID STORE, EXPUNGE, LOGOUT.
class ImapSession : public MailSession
{
public:
    ImapSession(std::unique_ptr<net::Transport> transport, const MailAccount& account, SessionOptions options = {});

    std::vector<ListEntry> list() override;
    RawMessage fetch(const std::string& uid) override;
    void remove(const std::string& uid) override;
    void close() override;

    /// An untagged response with its literals pulled out in order of appearance.
    struct Untagged
    {
        std::string line;
        std::vector<std::string> literals;
    };

private:
    std::vector<Untagged> command(const std::string& line, ErrorKind failure_kind = ErrorKind::protocol_error,
                                  bool sensitive = false);
    Untagged read_response();

    unsigned next_tag_ = 1;
};

/// IMAP quoted-string form of `value`.
std::string imap_quote(std::string_view value);

} // namespace mailbridge::mail
