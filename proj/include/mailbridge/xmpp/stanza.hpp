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

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mailbridge/xmpp/jid.hpp"

namespace mailbridge::xmpp
{

/**
XML element tree in the subset used on the wire: a node carries either
children or text, never both. Attribute keys are unique and keep insertion
order, which is also their serialization order.
**/
class Stanza
{
public:
    using Attribute = std::pair<std::string, std::string>;

    Stanza() = default;
    explicit Stanza(std::string name) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    const std::vector<Attribute>& attributes() const { return attributes_; }
    std::optional<std::string> attribute(std::string_view key) const;
    /// Replaces an existing value in place or appends a new key.
    Stanza& set_attribute(std::string key, std::string value);

    const std::vector<Stanza>& children() const { return children_; }
    /// Throws precondition when the node already carries text.
    Stanza& add_child(Stanza child);
    const Stanza* child(std::string_view name) const;

    const std::string& text() const { return text_; }
    /// Throws precondition when the node already has children.
    Stanza& set_text(std::string text);

    friend bool operator==(const Stanza&, const Stanza&) = default;

private:
    std::string name_;
    std::vector<Attribute> attributes_;
    std::vector<Stanza> children_;
    std::string text_;
};

/// `<message type=... to=... xmlns="jabber:client"><body>...</body></message>`
Stanza build_message_stanza(const Jid& to, std::string_view body, std::string_view type = "normal");

/**
Canonical form: attributes in insertion order and double-quoted, `& < > "`
escaped in attribute values, `& < >` escaped in text, no added whitespace,
and empty elements written as an open/close pair.
**/
std::string serialize(const Stanza& stanza);

std::string escape_text(std::string_view text);
std::string escape_attribute(std::string_view value);

/// Replaces code points that XML 1.0 cannot carry with U+FFFD.
std::string xml_safe(std::string_view text);

} // namespace mailbridge::xmpp
