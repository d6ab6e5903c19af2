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
#include <memory>
#include <ostream>
#include <string>
#include <string_view>

#include "mailbridge/error.hpp"
#include "mailbridge/net/transport.hpp"
#include "mailbridge/xmpp/jid.hpp"
#include "mailbridge/xmpp/stanza.hpp"
#include "mailbridge/xmpp/xml_reader.hpp"

namespace mailbridge::xmpp
{

inline constexpr std::string_view ns_client = "jabber:client";
inline constexpr std::string_view ns_streams = "http://etherx.jabber.org/streams";
inline constexpr std::string_view ns_sasl = "urn:ietf:params:xml:ns:xmpp-sasl";
inline constexpr std::string_view ns_bind = "urn:ietf:params:xml:ns:xmpp-bind";
inline constexpr std::string_view ns_session = "urn:ietf:params:xml:ns:xmpp-session";

/// Credentials of the sending ("alerts") account.
struct XmppAccount
{
    Jid jid;
    Secret password;
    std::string host;
    std::uint16_t port = 5222;
    std::string resource = "mailbridge";
    net::TlsMode tls = net::TlsMode::none;
    /// Permits SASL PLAIN over an unencrypted connection to a non-loopback host.
    bool allow_insecure = false;

    net::Endpoint endpoint() const { return {host, port, tls}; }
};

std::ostream& operator<<(std::ostream& out, const XmppAccount& account);

struct StreamFeatures
{
    bool plain = false;
    bool bind = false;
    bool session_required = false;
    std::string stream_id;
};

/// base64(authzid NUL authcid NUL password). authcid must be nonempty.
std::string sasl_plain_payload(std::string_view authzid, std::string_view authcid, std::string_view password);

/// Stream header a client sends to open (or restart) a stream to `domain`.
std::string stream_header(std::string_view domain);

/**
Client end of one XMPP stream. Call open_stream, then authenticate_and_bind;
only a bound client may send presence or messages.
**/
class XmppClient
{
public:
    explicit XmppClient(std::unique_ptr<net::Transport> transport);
    ~XmppClient();

    XmppClient(const XmppClient&) = delete;
    XmppClient& operator=(const XmppClient&) = delete;

    StreamFeatures open_stream(std::string_view domain);

    /// SASL PLAIN, stream restart and resource binding. Returns the full JID assigned by the server.
    Jid authenticate_and_bind(const XmppAccount& account);

    void send_presence_available();
    void send(const Stanza& stanza);

    /// Closes the stream and waits for the server to close its side.
    void close();

    bool bound() const { return bound_; }
    const Jid& jid() const { return jid_; }

private:
    StreamFeatures read_stream_start();
    XmlEvent next_element();
    void write(std::string_view data);

    std::unique_ptr<net::Transport> transport_;
    XmlStreamReader reader_;
    StreamFeatures features_;
    std::string domain_;
    bool opened_ = false;
    bool bound_ = false;
    bool closed_ = false;
    Jid jid_;
};

/**
Connects to the account's server and runs the full login sequence:
stream, SASL PLAIN, bind and initial presence. Refuses plaintext PLAIN to
non-loopback hosts unless allow_insecure is set.
**/
std::unique_ptr<XmppClient> connect_client(const XmppAccount& account, const net::Connector& connector);

} // namespace mailbridge::xmpp
