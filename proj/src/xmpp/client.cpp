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
#include "mailbridge/xmpp/client.hpp"

#include "mailbridge/codec.hpp"
#include "mailbridge/log.hpp"

namespace mailbridge::xmpp
{

namespace
{

constexpr std::string_view component = "xmpp";

std::string local_name(std::string_view name)
{
    const auto colon = name.find(':');
    return std::string(colon == std::string_view::npos ? name : name.substr(colon + 1));
}

// First child element name of a <stream:error/> or <failure/>, which carries the condition.
std::string condition_of(const Stanza& error)
{
    for (const auto& child : error.children())
        if (local_name(child.name()) != "text")
            return local_name(child.name());
    return "undefined-condition";
}

std::string text_of(const Stanza& error)
{
    for (const auto& child : error.children())
        if (local_name(child.name()) == "text")
            return child.text();
    return {};
}

[[noreturn]] void throw_stream_error(const Stanza& error)
{
    std::string message = "stream error: " + condition_of(error);
    if (const auto text = text_of(error); !text.empty())
        message += " (" + text + ")";
    throw Error(ErrorKind::stream_error, message);
}

} // namespace

std::ostream& operator<<(std::ostream& out, const XmppAccount& account)
{
    return out << account.jid.str() << ":" << redacted << "@" << account.host << ":" << account.port;
}

std::string sasl_plain_payload(std::string_view authzid, std::string_view authcid, std::string_view password)
{
    if (authcid.empty())
        throw Error(ErrorKind::precondition, "SASL PLAIN requires a nonempty authentication identity");
    std::string message;
    message.reserve(authzid.size() + authcid.size() + password.size() + 2);
    message.append(authzid).push_back('\0');
    message.append(authcid).push_back('\0');
    message.append(password);
    return codec::base64_encode(message);
}

std::string stream_header(std::string_view domain)
{
    return "<?xml version=\"1.0\"?><stream:stream to=\"" + escape_attribute(domain) + "\" xmlns=\"" +
           std::string(ns_client) + "\" xmlns:stream=\"" + std::string(ns_streams) + "\" version=\"1.0\">";
}

XmppClient::XmppClient(std::unique_ptr<net::Transport> transport)
    : transport_(std::move(transport)), reader_(*transport_)
{
}

XmppClient::~XmppClient() = default;

void XmppClient::write(std::string_view data)
{
    transport_->write_all(data);
}

XmlEvent XmppClient::next_element()
{
    XmlEvent event = reader_.next();
    if (event.kind == XmlEvent::Kind::stream_close)
        throw Error(ErrorKind::stream_error, "server closed the stream");
    if (event.kind == XmlEvent::Kind::element && event.element.name() == "stream:error")
        throw_stream_error(event.element);
    if (event.kind != XmlEvent::Kind::element)
        throw Error(ErrorKind::malformed_xml, "unexpected stream header");
    return event;
}

StreamFeatures XmppClient::read_stream_start()
{
    const XmlEvent header = reader_.next();
    if (header.kind == XmlEvent::Kind::element && header.element.name() == "stream:error")
        throw_stream_error(header.element);
    if (header.kind != XmlEvent::Kind::stream_open)
        throw Error(ErrorKind::malformed_xml, "expected a stream header from the server");

    StreamFeatures features;
    features.stream_id = header.element.attribute("id").value_or("");

    const XmlEvent event = next_element();
    if (event.element.name() != "stream:features")
        throw Error(ErrorKind::malformed_xml, "expected <stream:features>, got <" + event.element.name() + ">");
    for (const auto& feature : event.element.children())
    {
        const std::string name = local_name(feature.name());
        if (name == "mechanisms")
        {
            for (const auto& mechanism : feature.children())
                if (codec::trim(mechanism.text()) == "PLAIN")
                    features.plain = true;
        }
        else if (name == "bind")
            features.bind = true;
        else if (name == "session")
            features.session_required = feature.child("optional") == nullptr;
    }
    return features;
}

StreamFeatures XmppClient::open_stream(std::string_view domain)
{
    domain_ = std::string(domain);
    write(stream_header(domain));
    opened_ = true;
    features_ = read_stream_start();
    log::debug(component, std::string("features: plain=") + (features_.plain ? "yes" : "no") +
                              " bind=" + (features_.bind ? "yes" : "no"));
    return features_;
}

Jid XmppClient::authenticate_and_bind(const XmppAccount& account)
{
    if (!opened_)
        throw Error(ErrorKind::precondition, "authenticate_and_bind before open_stream");
    if (!features_.plain)
        throw Error(ErrorKind::auth_failure, "server does not offer SASL PLAIN");

    Stanza auth("auth");
    auth.set_attribute("xmlns", std::string(ns_sasl));
    auth.set_attribute("mechanism", "PLAIN");
    auth.set_text(sasl_plain_payload("", account.jid.localpart(), account.password.reveal()));
    write(serialize(auth));

    const XmlEvent outcome = next_element();
    const std::string outcome_name = local_name(outcome.element.name());
    if (outcome_name == "failure")
        throw Error(ErrorKind::auth_failure, "authentication as " + account.jid.bare().str() +
                                                 " rejected: " + condition_of(outcome.element));
    if (outcome_name != "success")
        throw Error(ErrorKind::auth_failure, "unexpected SASL response <" + outcome.element.name() + ">");

    // stream restart after SASL
    write(stream_header(domain_));
    features_ = read_stream_start();
    if (!features_.bind)
        throw Error(ErrorKind::bind_failure, "server does not offer resource binding");

    Stanza iq("iq");
    iq.set_attribute("type", "set");
    iq.set_attribute("id", "bind_1");
    Stanza bind("bind");
    bind.set_attribute("xmlns", std::string(ns_bind));
    if (!account.resource.empty())
    {
        Stanza resource("resource");
        resource.set_text(account.resource);
        bind.add_child(std::move(resource));
    }
    iq.add_child(std::move(bind));
    write(serialize(iq));

    while (true)
    {
        const XmlEvent event = next_element();
        const Stanza& reply = event.element;
        if (reply.name() != "iq" || reply.attribute("id") != "bind_1")
            continue;
        if (reply.attribute("type") != "result")
            throw Error(ErrorKind::bind_failure, "resource binding refused");
        const Stanza* bound = reply.child("bind");
        const Stanza* jid = bound ? bound->child("jid") : nullptr;
        if (!jid)
            throw Error(ErrorKind::bind_failure, "bind result carries no JID");
        try
        {
            jid_ = parse_jid(codec::trim(jid->text()));
        }
        catch (const Error& e)
        {
            throw Error(ErrorKind::bind_failure, std::string("server assigned an unusable JID: ") + e.what());
        }
        break;
    }

    if (features_.session_required)
    {
        Stanza session_iq("iq");
        session_iq.set_attribute("type", "set");
        session_iq.set_attribute("id", "sess_1");
        Stanza session("session");
        session.set_attribute("xmlns", std::string(ns_session));
        session_iq.add_child(std::move(session));
        write(serialize(session_iq));
        while (true)
        {
            const XmlEvent event = next_element();
            if (event.element.name() != "iq" || event.element.attribute("id") != "sess_1")
                continue;
            if (event.element.attribute("type") != "result")
                throw Error(ErrorKind::bind_failure, "session establishment refused");
            break;
        }
    }

    bound_ = true;
    log::info(component, "bound as " + jid_.str());
    return jid_;
}

void XmppClient::send_presence_available()
{
    if (!bound_)
        throw Error(ErrorKind::precondition, "presence requires a bound stream");
    write(serialize(Stanza("presence")));
}

void XmppClient::send(const Stanza& stanza)
{
    if (!bound_)
        throw Error(ErrorKind::precondition, "sending stanzas requires a bound stream");
    write(serialize(stanza));
}

void XmppClient::close()
{
    if (closed_ || !opened_)
        return;
    closed_ = true;
    write("</stream:stream>");
    try
    {
        for (int i = 0; i < 64; ++i)
            if (reader_.next().kind == XmlEvent::Kind::stream_close)
                break;
    }
    catch (const Error&)
    {
        // peer may drop the connection instead of closing the stream
    }
}

std::unique_ptr<XmppClient> connect_client(const XmppAccount& account, const net::Connector& connector)
{
    if (account.tls == net::TlsMode::none && !account.allow_insecure && !net::is_loopback_host(account.host))
        throw Error(ErrorKind::config_error, "refusing SASL PLAIN over plaintext to " + account.host +
                                                 "; use tls = implicit or allow_insecure = true");

    auto client = std::make_unique<XmppClient>(connector(account.endpoint()));
    client->open_stream(account.jid.domain());
    client->authenticate_and_bind(account);
    client->send_presence_available();
    return client;
}

} // namespace mailbridge::xmpp
