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

#include <string>
#include <string_view>

#include "mailbridge/net/transport.hpp"
#include "mailbridge/xmpp/stanza.hpp"

namespace mailbridge::xmpp
{

struct XmlEvent
{
    enum class Kind
    {
        stream_open,
        stream_close,
        element,
    };

    Kind kind = Kind::element;
    /// For stream_open: the stream header with its attributes and no children.
    Stanza element;
};

/**
Pull reader for an XMPP XML stream: yields the opening stream header, each
complete top-level element as a tree, and the closing stream tag. Handles
the XML declaration, comments, CDATA and the predefined and numeric
entities. Whitespace-only text next to child elements is dropped.
**/
class XmlStreamReader
{
public:
    explicit XmlStreamReader(net::Transport& transport) : reader_(transport) {}

    /// Throws malformed_xml on syntax errors and transport_error when the stream ends early.
    XmlEvent next();

private:
    int get();
    int peek();
    void expect(char c);
    void skip_space();
    void skip_until(std::string_view terminator);
    std::string read_name();
    std::string read_entity();
    void read_attributes(Stanza& node, bool& self_closing);
    void read_content(Stanza& node, int depth);

    net::StreamReader reader_;
    std::string stream_name_;
    std::size_t consumed_ = 0;
};

/// Parses a single serialized element. Throws malformed_xml.
Stanza parse_stanza(std::string_view xml);

} // namespace mailbridge::xmpp
