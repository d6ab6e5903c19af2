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

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mailbridge/testkit/listener.hpp"
#include "mailbridge/xmpp/client.hpp"

namespace mailbridge::testkit
{

struct XmppEvent
{
    enum class Kind
    {
        auth,
        auth_failed,
        bind,
        stanza,
        close,
    };

    Kind kind = Kind::stanza;
    /// authcid for auth events, bound resource for bind events
    std::string detail;
    xmpp::Stanza stanza;
};

struct XmppFaults
{
    /// Reply to the stream header with <stream:error> carrying this condition.
    std::optional<std::string> stream_error;
    /// Bind this resource regardless of what the client asks for.
    std::optional<std::string> assigned_resource;
    /// Recipients are offline. The server still accepts and stores every message.
    bool recipient_offline = false;
    bool close_immediately = false;
};

/**
XMPP server subset on a loopback port: stream header, SASL PLAIN checked
against a predicate, resource binding, then every stanza is recorded as a
parsed tree.
**/
class MockXmppServer
{
public:
    using PasswordCheck = std::function<bool(const std::string& authcid, const std::string& password)>;

    explicit MockXmppServer(std::string domain = "example.org", PasswordCheck accept = nullptr,
                            XmppFaults faults = {});
    ~MockXmppServer();

    MockXmppServer(const MockXmppServer&) = delete;
    MockXmppServer& operator=(const MockXmppServer&) = delete;

    std::uint16_t port() const { return listener_->port(); }
    net::Endpoint endpoint() const { return listener_->endpoint(); }
    const std::string& domain() const { return domain_; }

    /// Account settings for `localpart@domain` pointing at this server.
    xmpp::XmppAccount account(std::string localpart = "alerts", std::string password = "secret") const;

    std::vector<XmppEvent> transcript() const;
    /// Recorded <message/> stanzas in arrival order.
    std::vector<xmpp::Stanza> messages() const;
    /// Every octet received from clients, all connections concatenated.
    std::string received() const;
    void clear();

    void set_faults(XmppFaults faults);

    void stop() { listener_->stop(); }
    bool wait_idle(std::chrono::milliseconds timeout = std::chrono::seconds(5)) { return listener_->wait_idle(timeout); }
    std::size_t connections() const { return listener_->accepted(); }

private:
    void serve(net::Transport& transport);
    void record(XmppEvent event);

    std::string domain_;
    PasswordCheck accept_;
    mutable std::mutex mutex_;
    XmppFaults faults_;
    std::vector<XmppEvent> transcript_;
    std::string received_;
    unsigned next_stream_id_ = 1;
    std::unique_ptr<Listener> listener_;
};

} // namespace mailbridge::testkit
