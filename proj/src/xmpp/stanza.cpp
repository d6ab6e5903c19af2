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
#include "mailbridge/xmpp/stanza.hpp"

#include "mailbridge/codec.hpp"
#include "mailbridge/error.hpp"

namespace mailbridge::xmpp
{

std::optional<std::string> Stanza::attribute(std::string_view key) const
{
    for (const auto& [k, v] : attributes_)
        if (k == key)
            return v;
    return std::nullopt;
}

Stanza& Stanza::set_attribute(std::string key, std::string value)
{
    for (auto& [k, v] : attributes_)
    {
        if (k == key)
        {
            v = std::move(value);
            return *this;
        }
    }
    attributes_.emplace_back(std::move(key), std::move(value));
    return *this;
}

Stanza& Stanza::add_child(Stanza child)
{
    if (!text_.empty())
        throw Error(ErrorKind::precondition, "<" + name_ + "> already has text; mixed content is not supported");
    children_.push_back(std::move(child));
    return *this;
}

const Stanza* Stanza::child(std::string_view name) const
{
    for (const auto& c : children_)
        if (c.name_ == name)
            return &c;
    return nullptr;
}

Stanza& Stanza::set_text(std::string text)
{
    if (!children_.empty() && !text.empty())
        throw Error(ErrorKind::precondition, "<" + name_ + "> already has children; mixed content is not supported");
    text_ = std::move(text);
    return *this;
}

Stanza build_message_stanza(const Jid& to, std::string_view body, std::string_view type)
{
    Stanza message("message");
    message.set_attribute("type", std::string(type));
    message.set_attribute("to", to.str());
    message.set_attribute("xmlns", "jabber:client");

    Stanza body_node("body");
    body_node.set_text(xml_safe(body));
    message.add_child(std::move(body_node));
    return message;
}

std::string escape_text(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (char c : text)
    {
        switch (c)
        {
        case '&': out.append("&amp;"); break;
        case '<': out.append("&lt;"); break;
        case '>': out.append("&gt;"); break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string escape_attribute(std::string_view value)
{
    std::string out;
    out.reserve(value.size());
    for (char c : value)
    {
        switch (c)
        {
        case '&': out.append("&amp;"); break;
        case '<': out.append("&lt;"); break;
        case '>': out.append("&gt;"); break;
        case '"': out.append("&quot;"); break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string xml_safe(std::string_view text)
{
    const std::string valid = codec::utf8_sanitize(text);
    std::string out;
    out.reserve(valid.size());
    for (std::size_t i = 0; i < valid.size(); ++i)
    {
        const auto c = static_cast<unsigned char>(valid[i]);
        if (c < 0x20 && c != '\t' && c != '\n' && c != '\r')
        {
            out.append("\xEF\xBF\xBD");
            continue;
        }
        // U+FFFE and U+FFFF
        if (c == 0xEF && i + 2 < valid.size() && static_cast<unsigned char>(valid[i + 1]) == 0xBF &&
            (static_cast<unsigned char>(valid[i + 2]) == 0xBE || static_cast<unsigned char>(valid[i + 2]) == 0xBF))
        {
            out.append("\xEF\xBF\xBD");
            i += 2;
            continue;
        }
        out.push_back(static_cast<char>(c));
    }
    return out;
}

namespace
{

void serialize_into(const Stanza& stanza, std::string& out)
{
    out.push_back('<');
    out.append(stanza.name());
    for (const auto& [key, value] : stanza.attributes())
    {
        out.push_back(' ');
        out.append(key).append("=\"").append(escape_attribute(value)).push_back('"');
    }
    out.push_back('>');
    if (stanza.children().empty())
        out.append(escape_text(stanza.text()));
    else
        for (const auto& child : stanza.children())
            serialize_into(child, out);
    out.append("</").append(stanza.name()).push_back('>');
}

} // namespace

std::string serialize(const Stanza& stanza)
{
    std::string out;
    serialize_into(stanza, out);
    return out;
}

} // namespace mailbridge::xmpp
