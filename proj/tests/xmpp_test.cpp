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
#include "doctest.h"

#include "mailbridge/xmpp/jid.hpp"
#include "mailbridge/xmpp/stanza.hpp"
#include "mailbridge/xmpp/xml_reader.hpp"
#include "stanza_generator.hpp"
#include "support.hpp"

using namespace mailbridge;
using xmpp::parse_jid;

namespace
{

bool rejects(std::string_view input)
{
    try
    {
        parse_jid(input);
    }
    catch (const Error& e)
    {
        return e.kind() == ErrorKind::invalid_jid;
    }
    return false;
}

} // namespace

TEST_CASE("jid parsing")
{
    const auto plain = parse_jid("user@server");
    CHECK(plain.localpart() == "user");
    CHECK(plain.domain() == "server");
    CHECK(plain.resource().empty());

    const auto full = parse_jid("Alice@Example.ORG/Home");
    CHECK(full.localpart() == "alice");
    CHECK(full.domain() == "example.org");
    CHECK(full.resource() == "Home");
    CHECK(full.str() == "alice@example.org/Home");
    CHECK(full.bare().str() == "alice@example.org");

    const auto domain_only = parse_jid("example.org");
    CHECK(domain_only.localpart().empty());
    CHECK(domain_only.str() == "example.org");

}

TEST_CASE("jid rejections")
{
    CHECK(rejects("@example.org"));
    CHECK(rejects("user@"));
    CHECK(rejects(""));
    CHECK(rejects("us er@example.org"));
    CHECK(rejects("user@exa\tmple.org"));
    CHECK(rejects("a@b@c"));
    CHECK(rejects("a@b/"));
    CHECK(rejects("/res"));
    CHECK(rejects("a@b/res/with/slashes"));
    CHECK(rejects("a@b/r@x"));
    CHECK(rejects("a@b/two words"));
}

TEST_CASE("jid parsing is idempotent")
{
    for (const char* input : {"user@server", "Alice@Example.ORG/Home", "example.org", "X@Y/Zz"})
    {
        const auto once = parse_jid(input);
        CHECK(parse_jid(once.str()) == once);
    }
}

TEST_CASE("message stanza matches the reference listing")
{
    const auto stanza = xmpp::build_message_stanza(parse_jid("alice@example.org"), "hello");
    CHECK(xmpp::serialize(stanza) ==
          R"(<message type="normal" to="alice@example.org" xmlns="jabber:client"><body>hello</body></message>)");
    CHECK(xmpp::serialize(xmpp::build_message_stanza(parse_jid("a@b"), "")) ==
          R"(<message type="normal" to="a@b" xmlns="jabber:client"><body></body></message>)");
    CHECK(xmpp::serialize(xmpp::build_message_stanza(parse_jid("a@b"), "a<b&c")).find("<body>a&lt;b&amp;c</body>") !=
          std::string::npos);
    CHECK(xmpp::build_message_stanza(parse_jid("a@b"), "x", "chat").attribute("type") == "chat");
}

TEST_CASE("escaping")
{
    xmpp::Stanza s("x");
    s.set_attribute("q", "say \"hi\" & <go>");
    CHECK(xmpp::serialize(s) == R"(<x q="say &quot;hi&quot; &amp; &lt;go&gt;"></x>)");
    CHECK(xmpp::escape_text("a>b") == "a&gt;b");
    CHECK(xmpp::xml_safe(std::string("a\x01" "b\tc", 5)) == "a\xEF\xBF\xBD" "b\tc");
}

TEST_CASE("stanza invariants")
{
    xmpp::Stanza s("a");
    s.set_attribute("k", "1").set_attribute("j", "2").set_attribute("k", "3");
    REQUIRE(s.attributes().size() == 2);
    CHECK(s.attributes()[0] == xmpp::Stanza::Attribute{"k", "3"});
    s.set_text("t");
    CHECK_THROWS_AS(s.add_child(xmpp::Stanza("c")), Error);
    xmpp::Stanza p("p");
    p.add_child(xmpp::Stanza("c"));
    CHECK_THROWS_AS(p.set_text("t"), Error);
}

TEST_CASE("generated stanzas survive serialize then parse")
{
    test::StanzaGenerator gen(42);
    for (int i = 0; i < 300; ++i)
    {
        const auto s = gen.next();
        const std::string wire = xmpp::serialize(s);
        // no raw markup characters inside text nodes
        CHECK(wire.find("<<") == std::string::npos);
        const auto parsed = xmpp::parse_stanza(wire);
        CHECK(parsed == s);
    }
}

TEST_CASE("xml reader accepts what servers send")
{
    CHECK(xmpp::parse_stanza("<a x='1'/>").attribute("x") == "1");
    CHECK(xmpp::parse_stanza("<a>&#65;&#x42;&apos;</a>").text() == "AB'");
    CHECK(xmpp::parse_stanza("<a><![CDATA[<raw>]]></a>").text() == "<raw>");
    CHECK(xmpp::parse_stanza("<a>\n  <b>x</b>\n</a>").children().size() == 1);
    CHECK(xmpp::parse_stanza("<a><!-- c --><b></b></a>").children().size() == 1);
}

TEST_CASE("xml reader rejects broken input")
{
    for (const char* bad : {"<a>", "<a></b>", "<a x=1></a>", "<a>&bogus;</a>", "", "<a x='1' x='2'></a>"})
    {
        try
        {
            xmpp::parse_stanza(bad);
            FAIL("accepted: " << bad);
        }
        catch (const Error& e)
        {
            CHECK(e.kind() == ErrorKind::malformed_xml);
        }
    }
}

TEST_CASE("xml stream events")
{
    net::StringTransport transport("<?xml version='1.0'?><stream:stream xmlns='jabber:client' "
                                   "xmlns:stream='http://etherx.jabber.org/streams' id='s1'>"
                                   "<stream:features><bind/></stream:features></stream:stream>");
    xmpp::XmlStreamReader reader(transport);
    auto open = reader.next();
    CHECK(open.kind == xmpp::XmlEvent::Kind::stream_open);
    CHECK(open.element.attribute("id") == "s1");
    auto features = reader.next();
    CHECK(features.kind == xmpp::XmlEvent::Kind::element);
    CHECK(features.element.name() == "stream:features");
    CHECK(features.element.child("bind") != nullptr);
    CHECK(reader.next().kind == xmpp::XmlEvent::Kind::stream_close);
}
