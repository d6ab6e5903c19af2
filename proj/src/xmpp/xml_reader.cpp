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
#include "mailbridge/xmpp/xml_reader.hpp"

#include <charconv>

#include "mailbridge/codec.hpp"
#include "mailbridge/error.hpp"

namespace mailbridge::xmpp
{

namespace
{

constexpr int max_depth = 64;
constexpr std::size_t max_element_octets = std::size_t{16} << 20;

[[noreturn]] void malformed(const std::string& what)
{
    throw Error(ErrorKind::malformed_xml, "malformed XML: " + what);
}

bool is_name_char(int c)
{
    return c > 0x20 && c != '/' && c != '>' && c != '=' && c != '<' && c != '"' && c != '\'';
}

void append_code_point(std::string& out, std::uint32_t cp)
{
    if (cp == 0 || (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF)
        malformed("invalid character reference");
    if (cp < 0x80)
        out.push_back(static_cast<char>(cp));
    else if (cp < 0x800)
    {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
    else if (cp < 0x10000)
    {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
    else
    {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_stream_header(std::string_view name)
{
    return name == "stream" || name.ends_with(":stream");
}

} // namespace

int XmlStreamReader::get()
{
    const int c = reader_.get();
    if (c < 0)
        throw Error(ErrorKind::transport_error, "XML stream ended unexpectedly");
    if (++consumed_ > max_element_octets)
        malformed("element exceeds size limit");
    return c;
}

int XmlStreamReader::peek()
{
    const int c = reader_.peek();
    if (c < 0)
        throw Error(ErrorKind::transport_error, "XML stream ended unexpectedly");
    return c;
}

void XmlStreamReader::expect(char c)
{
    const int got = get();
    if (got != static_cast<unsigned char>(c))
        malformed(std::string("expected '") + c + "'");
}

void XmlStreamReader::skip_space()
{
    while (codec::is_space(static_cast<char>(peek())))
        get();
}

void XmlStreamReader::skip_until(std::string_view terminator)
{
    std::string window;
    while (true)
    {
        window.push_back(static_cast<char>(get()));
        if (window.size() > terminator.size())
            window.erase(0, 1);
        if (window == terminator)
            return;
    }
}

std::string XmlStreamReader::read_name()
{
    std::string name;
    while (is_name_char(peek()))
        name.push_back(static_cast<char>(get()));
    if (name.empty())
        malformed("expected a name");
    return name;
}

std::string XmlStreamReader::read_entity()
{
    std::string entity;
    while (true)
    {
        const int c = get();
        if (c == ';')
            break;
        entity.push_back(static_cast<char>(c));
        if (entity.size() > 10)
            malformed("unterminated entity reference");
    }
    if (entity == "lt")
        return "<";
    if (entity == "gt")
        return ">";
    if (entity == "amp")
        return "&";
    if (entity == "quot")
        return "\"";
    if (entity == "apos")
        return "'";
    if (entity.size() > 1 && entity[0] == '#')
    {
        const bool hex = entity[1] == 'x' || entity[1] == 'X';
        const std::string_view digits = std::string_view(entity).substr(hex ? 2 : 1);
        std::uint32_t cp = 0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
        if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size())
            malformed("bad character reference &" + entity + ";");
        std::string out;
        append_code_point(out, cp);
        return out;
    }
    malformed("unknown entity &" + entity + ";");
}

void XmlStreamReader::read_attributes(Stanza& node, bool& self_closing)
{
    self_closing = false;
    while (true)
    {
        skip_space();
        const int c = peek();
        if (c == '>')
        {
            get();
            return;
        }
        if (c == '/')
        {
            get();
            expect('>');
            self_closing = true;
            return;
        }
        std::string key = read_name();
        skip_space();
        expect('=');
        skip_space();
        const int quote = get();
        if (quote != '"' && quote != '\'')
            malformed("attribute value must be quoted");
        std::string value;
        while (true)
        {
            const int v = get();
            if (v == quote)
                break;
            if (v == '<')
                malformed("'<' in attribute value");
            if (v == '&')
                value.append(read_entity());
            else
                value.push_back(static_cast<char>(v));
        }
        if (node.attribute(key))
            malformed("duplicate attribute '" + key + "'");
        node.set_attribute(std::move(key), std::move(value));
    }
}

void XmlStreamReader::read_content(Stanza& node, int depth)
{
    if (depth > max_depth)
        malformed("nesting too deep");

    std::string text;
    std::vector<Stanza> children;
    while (true)
    {
        const int c = get();
        if (c == '&')
        {
            text.append(read_entity());
            continue;
        }
        if (c != '<')
        {
            text.push_back(static_cast<char>(c));
            continue;
        }
        const int n = peek();
        if (n == '/')
        {
            get();
            const std::string closing = read_name();
            skip_space();
            expect('>');
            if (closing != node.name())
                malformed("</" + closing + "> does not close <" + node.name() + ">");
            break;
        }
        if (n == '?')
        {
            skip_until("?>");
            continue;
        }
        if (n == '!')
        {
            get();
            if (peek() == '-')
            {
                expect('-');
                expect('-');
                skip_until("-->");
                continue;
            }
            for (char k : std::string_view("[CDATA["))
                expect(k);
            std::string cdata;
            while (!cdata.ends_with("]]>"))
                cdata.push_back(static_cast<char>(get()));
            cdata.resize(cdata.size() - 3);
            text.append(cdata);
            continue;
        }
        Stanza child(read_name());
        bool self_closing = false;
        read_attributes(child, self_closing);
        if (!self_closing)
            read_content(child, depth + 1);
        children.push_back(std::move(child));
    }

    if (children.empty())
        node.set_text(std::move(text));
    else
        for (auto& child : children)
            node.add_child(std::move(child));
}

XmlEvent XmlStreamReader::next()
{
    while (true)
    {
        consumed_ = 0;
        skip_space();
        const int c = get();
        if (c != '<')
            malformed("character data outside of an element");
        const int n = peek();
        if (n == '?')
        {
            skip_until("?>");
            continue;
        }
        if (n == '!')
        {
            get();
            expect('-');
            expect('-');
            skip_until("-->");
            continue;
        }
        if (n == '/')
        {
            get();
            const std::string name = read_name();
            skip_space();
            expect('>');
            if (stream_name_.empty() || name != stream_name_)
                malformed("unexpected closing tag </" + name + ">");
            stream_name_.clear();
            return {XmlEvent::Kind::stream_close, Stanza(name)};
        }

        XmlEvent event;
        event.element.set_name(read_name());
        bool self_closing = false;
        read_attributes(event.element, self_closing);
        // a restart after SASL success opens a new stream over the old one
        if (!self_closing && is_stream_header(event.element.name()))
        {
            stream_name_ = event.element.name();
            event.kind = XmlEvent::Kind::stream_open;
            return event;
        }
        if (!self_closing)
            read_content(event.element, 1);
        event.kind = XmlEvent::Kind::element;
        return event;
    }
}

Stanza parse_stanza(std::string_view xml)
{
    net::StringTransport transport{std::string(xml)};
    XmlStreamReader reader(transport);
    try
    {
        XmlEvent event = reader.next();
        if (event.kind != XmlEvent::Kind::element)
            malformed("expected an element");
        return std::move(event.element);
    }
    catch (const Error& e)
    {
        if (e.kind() == ErrorKind::transport_error)
            malformed("truncated input");
        throw;
    }
}

} // namespace mailbridge::xmpp
