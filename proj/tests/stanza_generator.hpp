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

#include <random>
#include <string>

#include "mailbridge/xmpp/stanza.hpp"

namespace mailbridge::test
{

/// Random Stanza trees obeying the children-xor-text rule, with awkward text and attribute values.
class StanzaGenerator
{
public:
    explicit StanzaGenerator(unsigned seed) : rng_(seed) {}

    xmpp::Stanza next(int depth = 0)
    {
        xmpp::Stanza node(name());
        const int attributes = pick(4);
        for (int i = 0; i < attributes; ++i)
            node.set_attribute(name() + std::to_string(i), text());
        if (depth < 4 && pick(2) == 0)
        {
            const int children = 1 + pick(3);
            for (int i = 0; i < children; ++i)
                node.add_child(next(depth + 1));
        }
        else if (pick(3) != 0)
        {
            std::string t = text();
            // whitespace-only text is dropped by the reader when siblings exist; keep leaves meaningful
            if (t.find_first_not_of(" \t\r\n") == std::string::npos)
                t += "x";
            node.set_text(t);
        }
        return node;
    }

private:
    int pick(int n) { return static_cast<int>(rng_() % static_cast<unsigned>(n)); }

    std::string name()
    {
        static const char* const names[] = {"message", "body", "iq", "x", "query", "item", "a-b", "n.s", "q_1"};
        return names[pick(9)];
    }

    std::string text()
    {
        static const char* const pieces[] = {"a", "<", ">", "&", "\"", "'", " ", "\t", "\n", "]]>",
                                             "&amp;", "\xE2\x82\xAC", "\xF0\x9F\x98\x80", "\xC3\xA9", "hello", "x=y"};
        std::string out;
        const int n = pick(8);
        for (int i = 0; i < n; ++i)
            out += pieces[pick(16)];
        return out;
    }

    std::mt19937 rng_;
};

} // namespace mailbridge::test
