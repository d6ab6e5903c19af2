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

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "mailbridge/mail/message.hpp"
#include "mailbridge/testkit/listener.hpp"

namespace mailbridge::testkit
{

/// One command received by a mock and the first line of its reply.
struct Exchange
{
    std::string command;
    std::string response;
};

/// Builds a CRLF-terminated message with the usual envelope headers.
mail::RawMessage make_message(std::string uid, std::string_view from, std::string_view to,
                              std::string_view subject, std::string_view body);

/**
Scripted POP3 or IMAP server on a loopback port, serving exactly the
command subsets the client uses. Deletion is modelled: POP3 DELE takes
effect on QUIT, IMAP \Deleted on EXPUNGE. IMAP uids must be decimal.
**/
class MockMailServer
{
public:
    MockMailServer(mail::Protocol protocol, std::vector<mail::RawMessage> mailbox = {}, FaultPlan faults = {});
    ~MockMailServer();

    MockMailServer(const MockMailServer&) = delete;
    MockMailServer& operator=(const MockMailServer&) = delete;

    std::uint16_t port() const { return listener_->port(); }
    net::Endpoint endpoint() const { return listener_->endpoint(); }

    /// Account settings that log into this server.
    mail::MailAccount account() const;

    void plant(mail::RawMessage message);
    std::vector<mail::RawMessage> mailbox() const;
    std::vector<Exchange> transcript() const;
    std::vector<std::string> commands() const;
    void clear_transcript();
    void set_faults(FaultPlan faults);

    void set_credentials(std::string username, std::string password);

    void stop() { listener_->stop(); }
    bool wait_idle(std::chrono::milliseconds timeout = std::chrono::seconds(5)) { return listener_->wait_idle(timeout); }

private:
    struct Stored
    {
        mail::RawMessage message;
        bool flagged_deleted = false;
    };

    void serve_pop3(net::Transport& transport);
    void serve_imap(net::Transport& transport);
    void record(std::string command, std::string response);

    mail::Protocol protocol_;
    mutable std::mutex mutex_;
    std::vector<Stored> mailbox_;
    std::vector<Exchange> transcript_;
    FaultPlan faults_;
    std::string username_ = "user";
    std::string password_ = "secret";
    std::unique_ptr<Listener> listener_;
};

} // namespace mailbridge::testkit
