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

#include "mailbridge/codec.hpp"
#include "mailbridge/router.hpp"
#include "support.hpp"

using namespace mailbridge;
using router::CheckerMode;
using router::RouteDecision;
using xmpp::parse_jid;

namespace
{

mail::EmailMessage message(std::string from, std::string subject, std::string body = "b")
{
    mail::EmailMessage msg;
    msg.from = std::move(from);
    msg.subject = std::move(subject);
    msg.body_text = std::move(body);
    return msg;
}

} // namespace

TEST_CASE("subject directive grammar")
{
    auto d = router::parse_subject_directive("USER: alice@example.org Lunch?");
    REQUIRE(d);
    CHECK(d->recipient == parse_jid("alice@example.org"));
    CHECK(d->residual == "Lunch?");

    CHECK_FALSE(router::parse_subject_directive("Re: status report"));

    d = router::parse_subject_directive("user:Bob@Example.ORG");
    REQUIRE(d);
    CHECK(d->recipient.str() == "bob@example.org");
    CHECK(d->residual.empty());

    d = router::parse_subject_directive("  UsEr:\tc@d  rest  of it  ");
    REQUIRE(d);
    CHECK(d->recipient.str() == "c@d");
    CHECK(d->residual == "rest  of it");

    d = router::parse_subject_directive("USER: a@b USER: c@d");
    REQUIRE(d);
    CHECK(d->recipient.str() == "a@b");
    CHECK(d->residual == "USER: c@d");

    CHECK_FALSE(router::parse_subject_directive("Fwd: USER: a@b"));
    CHECK_FALSE(router::parse_subject_directive("USER:"));
    CHECK_FALSE(router::parse_subject_directive("USERNAME: a@b"));
}

TEST_CASE("malformed directive jid warns")
{
    test::LogCapture logs;
    CHECK_FALSE(router::parse_subject_directive("USER: @broken hi"));
    CHECK(logs.text().find("warning") != std::string::npos);
}

TEST_CASE("directive success implies the prefix")
{
    std::mt19937 rng(3);
    const std::vector<std::string> pieces = {"USER:", "user:", " ", "a@b", "x", "@", "/", "Re:", "\t", "USER"};
    for (int i = 0; i < 1000; ++i)
    {
        std::string subject;
        for (int n = rng() % 6; n > 0; --n)
            subject += pieces[rng() % pieces.size()];
        if (router::parse_subject_directive(subject))
            CHECK(codec::istarts_with(codec::trim(subject), "USER:"));
    }
}

TEST_CASE("format body")
{
    auto msg = message("x@y", "ignored", "b");
    CHECK(router::format_body(msg, "hi") == "From: x@y\nSubject: hi\nDate: \n\nb");

    msg.body_text.clear();
    CHECK(router::format_body(msg, "s") == "From: x@y\nSubject: s\nDate: \n\n[no text content]");

    msg.body_text = std::string(70000, 'z');
    const auto out = router::format_body(msg, "s");
    const std::string suffix = "\n[truncated]";
    REQUIRE(out.size() > suffix.size());
    CHECK(out.ends_with(suffix));
    CHECK(codec::utf8_length(std::string_view(out).substr(0, out.size() - suffix.size())) <= 65536);

    msg.body_text.clear();
    for (int i = 0; i < 100; ++i)
        msg.body_text += "\xE2\x82\xAC";
    const auto small = router::format_body(msg, "s", 40);
    CHECK(codec::is_valid_utf8(small));
    CHECK(codec::utf8_length(small) == 40 + suffix.size());
}

TEST_CASE("type1 routing")
{
    const router::Whitelist none;
    const auto deliver = router::route(CheckerMode::type1, message("x@y", "USER: a@b hi"), {}, none);
    CHECK(deliver.kind == RouteDecision::Kind::deliver);
    CHECK(deliver.recipient.str() == "a@b");
    CHECK(deliver.body == "From: x@y\nSubject: hi\nDate: \n\nb");
    CHECK(router::describe(deliver) == "DELIVER a@b");

    const auto skip = router::route(CheckerMode::type1, message("x@y", "hello"), {}, none);
    CHECK(skip == RouteDecision::skip("no directive"));
    CHECK(router::describe(skip) == "SKIP no directive");
}

TEST_CASE("type2 routing and whitelist")
{
    const auto owner = parse_jid("owner@example.org");
    router::Whitelist wl;
    wl.enabled = true;
    wl.add("Friend@Example.org");

    auto d = router::route(CheckerMode::type2, message("Friend <friend@example.org>", "USER: a@b hi"), owner, wl);
    CHECK(d.kind == RouteDecision::Kind::deliver);
    CHECK(d.recipient == owner);
    CHECK(d.body.find("Subject: USER: a@b hi\n") != std::string::npos);

    d = router::route(CheckerMode::type2, message("spammer@evil.example", "buy"), owner, wl);
    CHECK(d == RouteDecision::reject("sender not whitelisted"));
    CHECK(router::describe(d) == "REJECT sender not whitelisted");

    CHECK_THROWS_AS(wl.add("no-at-sign"), ConfigError);
    CHECK_THROWS_AS(wl.add("a@b@c"), ConfigError);
}

TEST_CASE("routing properties over generated messages")
{
    std::mt19937 rng(99);
    const auto owner = parse_jid("owner@example.org");
    const std::vector<std::string> subjects = {"USER: a@b x", "user: c@d", "hello", "USER: @bad", "", "USER:e@f/g h"};
    const std::vector<std::string> senders = {"a@x", "B <b@x>", "junk", ""};
    router::Whitelist disabled;
    router::Whitelist wl;
    wl.enabled = true;
    wl.add("a@x");
    for (int i = 0; i < 500; ++i)
    {
        const auto msg = message(senders[rng() % senders.size()], subjects[rng() % subjects.size()],
                                 std::string(rng() % 5, 'q'));

        const auto t1 = router::route(CheckerMode::type1, msg, owner, wl);
        CHECK(t1 == router::route(CheckerMode::type1, msg, owner, wl));
        if (t1.kind == RouteDecision::Kind::deliver)
        {
            const auto directive = router::parse_subject_directive(msg.subject);
            REQUIRE(directive);
            CHECK(t1.recipient == directive->recipient);
            CHECK_FALSE(t1.body.empty());
        }

        const auto t2 = router::route(CheckerMode::type2, msg, owner, wl);
        if (t2.kind == RouteDecision::Kind::deliver)
            CHECK(t2.recipient == owner);
        CHECK(router::route(CheckerMode::type2, msg, owner, disabled).kind == RouteDecision::Kind::deliver);
    }
}
