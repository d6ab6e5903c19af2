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
#include "mailbridge/testkit/mock_xmpp.hpp"

#include "mailbridge/codec.hpp"

namespace mailbridge::testkit
{

namespace
{

std::string features(bool authenticated)
{
    std::string out = "<stream:features>";
    if (!authenticated)
        out += "<mechanisms xmlns=\"" + std::string(xmpp::ns_sasl) + "\"><mechanism>PLAIN</mechanism></mechanisms>";
    out += "<bind xmlns=\"" + std::string(xmpp::ns_bind) + "\"></bind>";
    out += "</stream:features>";
    return out;
}

} // namespace

MockXmppServer::MockXmppServer(std::string domain, PasswordCheck accept, XmppFaults faults)
    : domain_(std::move(domain)), accept_(std::move(accept)), faults_(std::move(faults))
{
    if (!accept_)
        accept_ = [](const std::string&, const std::string&) { return true; };
    listener_ = std::make_unique<Listener>([this](net::Transport& t) { serve(t); });
}

MockXmppServer::~MockXmppServer()
{
    listener_->stop();
}

xmpp::XmppAccount MockXmppServer::account(std::string localpart, std::string password) const
{
    xmpp::XmppAccount account;
    account.jid = xmpp::parse_jid(localpart + "@" + domain_);
    account.password = Secret(std::move(password));
    account.host = "127.0.0.1";
    account.port = port();
    return account;
}

std::vector<XmppEvent> MockXmppServer::transcript() const
{
    std::lock_guard lock(mutex_);
    return transcript_;
}

std::vector<xmpp::Stanza> MockXmppServer::messages() const
{
    std::lock_guard lock(mutex_);
    std::vector<xmpp::Stanza> out;
    for (const auto& e : transcript_)
        if (e.kind == XmppEvent::Kind::stanza && e.stanza.name() == "message")
            out.push_back(e.stanza);
    return out;
}

std::string MockXmppServer::received() const
{
    std::lock_guard lock(mutex_);
    return received_;
}

void MockXmppServer::clear()
{
    std::lock_guard lock(mutex_);
    transcript_.clear();
    received_.clear();
}

void MockXmppServer::set_faults(XmppFaults faults)
{
    std::lock_guard lock(mutex_);
    faults_ = std::move(faults);
}

void MockXmppServer::record(XmppEvent event)
{
    std::lock_guard lock(mutex_);
    transcript_.push_back(std::move(event));
}

void MockXmppServer::serve(net::Transport& socket)
{
    XmppFaults faults;
    unsigned stream_id;
    {
        std::lock_guard lock(mutex_);
        faults = faults_;
        stream_id = next_stream_id_++;
    }
    if (faults.close_immediately)
        return;

    RecordingTransport transport(socket, [this](std::string_view data) {
        std::lock_guard lock(mutex_);
        received_.append(data);
    });
    xmpp::XmlStreamReader reader(transport);
    const std::string header = "<?xml version=\"1.0\"?><stream:stream from=\"" + domain_ + "\" id=\"mock-" +
                               std::to_string(stream_id) + "\" xmlns=\"" + std::string(xmpp::ns_client) +
                               "\" xmlns:stream=\"" + std::string(xmpp::ns_streams) + "\" version=\"1.0\">";

    if (reader.next().kind != xmpp::XmlEvent::Kind::stream_open)
        return;
    transport.write_all(header);
    if (faults.stream_error)
    {
        transport.write_all("<stream:error><" + *faults.stream_error +
                            " xmlns=\"urn:ietf:params:xml:ns:xmpp-streams\"></" + *faults.stream_error +
                            "></stream:error></stream:stream>");
        return;
    }
    transport.write_all(features(false));

    std::string authcid;
    bool authenticated = false;
    bool bound = false;
    while (true)
    {
        const xmpp::XmlEvent event = reader.next();
        if (event.kind == xmpp::XmlEvent::Kind::stream_close)
        {
            record({XmppEvent::Kind::close, {}, {}});
            transport.write_all("</stream:stream>");
            return;
        }
        if (event.kind == xmpp::XmlEvent::Kind::stream_open)
        {
            // restart after SASL success
            transport.write_all(header);
            transport.write_all(features(authenticated));
            continue;
        }

        const xmpp::Stanza& stanza = event.element;
        if (!authenticated)
        {
            if (stanza.name() != "auth" || stanza.attribute("mechanism") != "PLAIN")
            {
                transport.write_all("<failure xmlns=\"" + std::string(xmpp::ns_sasl) +
                                    "\"><invalid-mechanism></invalid-mechanism></failure></stream:stream>");
                return;
            }
            const std::string payload = codec::base64_decode(stanza.text());
            const auto first = payload.find('\0');
            const auto second = first == std::string::npos ? first : payload.find('\0', first + 1);
            const bool well_formed = second != std::string::npos;
            authcid = well_formed ? payload.substr(first + 1, second - first - 1) : "";
            const std::string password = well_formed ? payload.substr(second + 1) : "";
            if (well_formed && !authcid.empty() && accept_(authcid, password))
            {
                authenticated = true;
                record({XmppEvent::Kind::auth, authcid, {}});
                transport.write_all("<success xmlns=\"" + std::string(xmpp::ns_sasl) + "\"></success>");
            }
            else
            {
                record({XmppEvent::Kind::auth_failed, authcid, {}});
                transport.write_all("<failure xmlns=\"" + std::string(xmpp::ns_sasl) +
                                    "\"><not-authorized></not-authorized></failure></stream:stream>");
                return;
            }
            continue;
        }

        if (!bound && stanza.name() == "iq" && stanza.child("bind"))
        {
            const xmpp::Stanza* requested = stanza.child("bind")->child("resource");
            std::string resource = requested ? requested->text() : "mock-" + std::to_string(stream_id);
            if (faults.assigned_resource)
                resource = *faults.assigned_resource;
            bound = true;
            record({XmppEvent::Kind::bind, resource, {}});
            xmpp::Stanza result("iq");
            result.set_attribute("type", "result");
            result.set_attribute("id", stanza.attribute("id").value_or(""));
            xmpp::Stanza bind("bind");
            bind.set_attribute("xmlns", std::string(xmpp::ns_bind));
            xmpp::Stanza jid("jid");
            jid.set_text(authcid + "@" + domain_ + "/" + resource);
            bind.add_child(std::move(jid));
            result.add_child(std::move(bind));
            transport.write_all(xmpp::serialize(result));
            continue;
        }

        // offline recipients make no difference here: the server stores and later delivers
        record({XmppEvent::Kind::stanza, {}, stanza});
    }
}

} // namespace mailbridge::testkit
