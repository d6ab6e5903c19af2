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
// Scenario checks for the whole bridge. Prints one PASS/FAIL line per
// criterion and exits nonzero when any of them fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "../stanza_generator.hpp"
#include "../support.hpp"
#include "mailbridge/codec.hpp"
#include "mailbridge/daemon/daemon.hpp"
#include "mailbridge/mail/session.hpp"
#include "mailbridge/testkit/crash.hpp"
#include "mailbridge/xmpp/xml_reader.hpp"

using namespace mailbridge;
using testkit::MockMailServer;
using testkit::MockXmppServer;
using testkit::make_message;

namespace
{

using Clock = std::chrono::steady_clock;

struct Check
{
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what)
    {
        if (!ok)
            failures.push_back(what);
    }
};

const std::string planted_date = "Mon, 1 Jun 2026 12:00:00 +0000";

/// Every <message ...>...</message> element exactly as it crossed the wire.
std::vector<std::string> wire_messages(const std::string& received)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while ((pos = received.find("<message", pos)) != std::string::npos)
    {
        const auto end = received.find("</message>", pos);
        if (end == std::string::npos)
            break;
        out.push_back(received.substr(pos, end + 10 - pos));
        pos = end + 10;
    }
    return out;
}

/// Hand-written expectation for the forwarded stanza of a planted message.
std::string expected_stanza(const std::string& to, const std::string& from, const std::string& subject,
                            const std::string& body)
{
    return "<message type=\"normal\" to=\"" + to + "\" xmlns=\"jabber:client\"><body>From: " + from +
           "\nSubject: " + subject + "\nDate: " + planted_date + "\n\n" + body + "\n</body></message>";
}

struct Scenario
{
    test::TempDir dir;
    MockXmppServer xmpp;
    MockMailServer mail;
    config::Config cfg;

    explicit Scenario(config::Mode mode = config::Mode::type1)
        : mail(mail::Protocol::imap), cfg(test::make_config(mode, xmpp, &mail, dir / "state"))
    {
    }
};

std::string report_text(const daemon::RunReport& r)
{
    return r.summary();
}

void end_to_end_type1(Check& c)
{
    Scenario s;
    struct Planted
    {
        std::string subject;
        std::string to;
        std::string residual;
    };
    const std::vector<Planted> planted = {
        {"USER: alice@example.org lunch?", "alice@example.org", "lunch?"},
        {"weekly report", "", ""},
        {"user: Bob@Example.ORG", "bob@example.org", ""},
        {"Re: weekly report", "", ""},
        {"invoice", "", ""},
        {"  USER:carol@example.org build <failed> & stopped", "carol@example.org", "build <failed> & stopped"},
        {"USER alice@example.org missing colon", "", ""},
        {"Fwd: USER: alice@example.org", "", ""},
        {"USER: alice@example.org second", "alice@example.org", "second"},
        {"newsletter", "", ""},
    };
    std::vector<std::string> expected;
    for (std::size_t i = 0; i < planted.size(); ++i)
    {
        const std::string body = "message " + std::to_string(i);
        s.mail.plant(make_message(std::to_string(100 + i), "sender@example.net", "shared@example.org",
                                  planted[i].subject, body));
        if (!planted[i].to.empty())
        {
            std::string residual = planted[i].residual;
            // the body is XML text, so markup characters arrive escaped
            std::string escaped;
            for (char ch : residual)
                escaped += ch == '<' ? "&lt;" : ch == '>' ? "&gt;" : ch == '&' ? "&amp;" : std::string(1, ch);
            expected.push_back(expected_stanza(planted[i].to, "sender@example.net", escaped, body));
        }
    }

    const auto start = Clock::now();
    const auto report = daemon::run_once(s.cfg);
    const auto elapsed = Clock::now() - start;
    s.xmpp.wait_idle();

    const auto wire = wire_messages(s.xmpp.received());
    c.expect(wire.size() == 4, "expected 4 stanzas, got " + std::to_string(wire.size()));
    c.expect(wire == expected, "forwarded stanzas differ from the expected bytes");
    std::set<std::string> recipients;
    for (const auto& m : s.xmpp.messages())
        recipients.insert(m.attribute("to").value_or(""));
    c.expect(recipients.size() == 3, "expected 3 distinct recipients");
    c.expect(report.forwarded == 4 && report.skipped == 6, "report " + report_text(report));
    c.expect(report.arithmetic_holds(), "report arithmetic");
    c.expect(elapsed < std::chrono::seconds(5), "run took too long");
}

void dedup(Check& c)
{
    Scenario s;
    for (int i = 0; i < 5; ++i)
        s.mail.plant(make_message(std::to_string(i + 1), "a@x.org", "s@x.org",
                                  i % 2 ? "no directive" : "USER: dave@example.org note", "b"));
    const auto first = daemon::run_once(s.cfg);
    c.expect(first.forwarded == 3, "first run " + report_text(first));
    s.xmpp.wait_idle();
    const std::size_t after_first = s.xmpp.messages().size();

    const auto second = daemon::run_once(s.cfg);
    s.xmpp.wait_idle();
    c.expect(second.fresh == 0 && second.forwarded == 0, "repeat run " + report_text(second));
    c.expect(s.xmpp.messages().size() == after_first, "repeat run sent stanzas");

    s.mail.plant(make_message("6", "a@x.org", "s@x.org", "USER: erin@example.org one more", "b"));
    const auto third = daemon::run_once(s.cfg);
    s.xmpp.wait_idle();
    c.expect(third.fresh == 1 && third.forwarded == 1, "third run " + report_text(third));
    const auto messages = s.xmpp.messages();
    c.expect(messages.size() == after_first + 1, "third run should add exactly one stanza");
    c.expect(!messages.empty() && messages.back().attribute("to") == "erin@example.org", "third run recipient");
}

void type2_whitelist(Check& c)
{
    Scenario s(config::Mode::type2);
    s.cfg.accounts[0].default_recipient = xmpp::parse_jid("owner@example.org");
    s.cfg.whitelist.enabled = true;
    s.cfg.whitelist.add("friend@example.net");
    s.mail.plant(make_message("1", "Friend <Friend@Example.net>", "me@example.org", "hi", "a"));
    s.mail.plant(make_message("2", "spammer@evil.example", "me@example.org", "buy", "b"));
    s.mail.plant(make_message("3", "friend@example.net", "me@example.org", "USER: other@example.org x", "c"));
    s.mail.plant(make_message("4", "stranger@example.com", "me@example.org", "hello", "d"));
    s.mail.plant(make_message("5", "spammer@evil.example", "me@example.org", "buy more", "e"));

    const auto report = daemon::run_once(s.cfg);
    s.xmpp.wait_idle();
    const auto messages = s.xmpp.messages();
    c.expect(report.forwarded == 2 && report.rejected == 3, "report " + report_text(report));
    c.expect(report.arithmetic_holds(), "report arithmetic");
    c.expect(messages.size() == 2, "expected 2 stanzas");
    for (const auto& m : messages)
    {
        c.expect(m.attribute("to") == "owner@example.org", "delivered to someone other than the default recipient");
        const auto* body = m.child("body");
        c.expect(body && body->text().find("riend@") != std::string::npos, "delivered a non-whitelisted sender");
    }
}

int run_binary(const std::string& args, const std::filesystem::path& input, const std::filesystem::path& out)
{
    const std::string command = std::string(MAILBRIDGE_BINARY) + " " + args + " < " + input.string() + " > " +
                                out.string() + " 2>/dev/null";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void pipe_mode(Check& c)
{
    test::TempDir dir;
    MockXmppServer xmpp;
    auto write_config = [&](std::uint16_t port) {
        test::write_file(dir / "c.ini", "[general]\nmode = pipe\n[xmpp]\njid = alerts@example.org\npassword = secret\n"
                                        "host = 127.0.0.1\nport = " +
                                            std::to_string(port) + "\n");
    };
    const std::string args = "--config " + (dir / "c.ini").string() + " --mode pipe";
    test::write_file(dir / "good", "From: monitor@example.net\r\nX-XMPP-To: frank@example.org\r\n"
                                   "Subject: disk full\r\n\r\n/var is at 99%\r\n");
    test::write_file(dir / "orphan", "From: monitor@example.net\r\nSubject: nobody\r\n\r\nbody\r\n");

    write_config(xmpp.port());
    const int ok = run_binary(args, dir / "good", dir / "out");
    xmpp.wait_idle();
    const auto messages = xmpp.messages();
    c.expect(ok == 0, "delivery exit " + std::to_string(ok));
    c.expect(messages.size() == 1 && messages[0].attribute("to") == "frank@example.org", "expected one stanza");
    c.expect(test::read_file(dir / "out").empty(), "stdout must stay empty");

    const auto listing_before = [&] {
        std::vector<std::string> names;
        for (const auto& e : std::filesystem::directory_iterator(dir.path()))
            names.push_back(e.path().filename().string());
        std::sort(names.begin(), names.end());
        return names;
    };
    const auto files = listing_before();
    write_config(testkit::refused_endpoint().port);
    const int down = run_binary(args, dir / "good", dir / "out");
    c.expect(down == 75, "server down exit " + std::to_string(down));
    c.expect(listing_before() == files && test::read_file(dir / "out").empty(), "server down left side effects");
    c.expect(xmpp.messages().size() == 1, "server down must not send anything");

    write_config(xmpp.port());
    const int orphan = run_binary(args, dir / "orphan", dir / "out");
    xmpp.wait_idle();
    c.expect(orphan == 67, "no recipient exit " + std::to_string(orphan));
    c.expect(xmpp.messages().size() == 1, "no recipient must not send anything");
}

void crash_consistency(Check& c)
{
    auto scenario = [&](daemon::Phase phase, std::size_t expected_total, const std::string& label) {
        Scenario s;
        for (int i = 1; i <= 3; ++i)
            s.mail.plant(make_message(std::to_string(i), "a@x.org", "s@x.org",
                                      "USER: gina@example.org m" + std::to_string(i), "body " + std::to_string(i)));
        daemon::RunOptions crashing;
        crashing.on_phase = testkit::crash_hook(phase, 2);
        bool crashed = false;
        try
        {
            daemon::run_once(s.cfg, crashing);
        }
        catch (const testkit::SimulatedCrash&)
        {
            crashed = true;
        }
        c.expect(crashed, label + ": hook did not fire");
        daemon::run_once(s.cfg);
        s.xmpp.wait_idle();

        std::map<std::string, int> seen;
        for (const auto& m : s.xmpp.messages())
            ++seen[m.child("body") ? m.child("body")->text() : ""];
        c.expect(seen.size() == 3, label + ": a message was lost");
        c.expect(s.xmpp.messages().size() == expected_total,
                 label + ": expected " + std::to_string(expected_total) + " stanzas, got " +
                     std::to_string(s.xmpp.messages().size()));
        const auto states = daemon::load_state(s.cfg.state_path);
        c.expect(states.count("shared") && states.at("shared").processed.size() == 3, label + ": state incomplete");
    };
    scenario(daemon::Phase::after_forward, 4, "after_forward");
    scenario(daemon::Phase::after_state_write, 3, "after_state_write");
}

void round_trips(Check& c)
{
    test::StanzaGenerator gen(20261019);
    int mismatches = 0;
    for (int i = 0; i < 200; ++i)
    {
        const auto s = gen.next();
        try
        {
            if (xmpp::parse_stanza(xmpp::serialize(s)) != s)
                ++mismatches;
        }
        catch (const Error&)
        {
            ++mismatches;
        }
    }
    c.expect(mismatches == 0, std::to_string(mismatches) + " stanza round-trip mismatches");

    test::LogCapture quiet;
    std::mt19937 rng(5322);
    int crashes = 0;
    for (int i = 0; i < 200; ++i)
    {
        std::string raw(1 + rng() % 512, '\0');
        for (auto& ch : raw)
            ch = static_cast<char>(rng());
        if (i % 2)
            raw = "Subject: =?utf-8?q?x=" + raw.substr(0, 20) + "?=\r\nContent-Type: multipart/mixed; boundary=z\r\n\r\n--z\r\n" + raw;
        try
        {
            const auto msg = mail::parse_message({"fuzz", raw});
            if (!codec::is_valid_utf8(msg.body_text))
                ++crashes;
        }
        catch (...)
        {
            ++crashes;
        }
    }
    c.expect(crashes == 0, std::to_string(crashes) + " fuzz inputs threw or produced invalid UTF-8");

    std::string octets = "Subject: literal\r\n\r\n";
    for (int i = 0; i < 4096; ++i)
        octets.push_back(static_cast<char>(rng()));
    octets += "\r\n)\r\nA0001 OK {5}\r\n";
    MockMailServer server(mail::Protocol::imap, {{"42", octets}});
    const auto account = server.account();
    auto session = mail::open_session(account, net::connect(account.endpoint()));
    session->list();
    c.expect(session->fetch("42").bytes == octets, "IMAP literal differs from planted octets");
    session->close();
}

void sasl_vector(Check& c)
{
    const std::string literal = "AHVzZXIAcGFzcw==";
    const std::string oracle = test::openssl_base64(std::string("\x00\x75\x73\x65\x72\x00\x70\x61\x73\x73", 10));
    c.expect(oracle == literal, "oracle disagrees with the published vector");
    c.expect(xmpp::sasl_plain_payload("", "user", "pass") == oracle, "payload differs from the oracle");
}

void throughput(Check& c)
{
    Scenario s;
    for (int i = 1; i <= 1000; ++i)
        s.mail.plant(make_message(std::to_string(i), "load@example.net", "s@example.org",
                                  "USER: user" + std::to_string(i % 7) + "@example.org item " + std::to_string(i),
                                  "payload " + std::to_string(i)));
    const auto start = Clock::now();
    const auto report = daemon::run_once(s.cfg);
    const auto elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    s.xmpp.wait_idle();
    c.expect(report.forwarded == 1000, "report " + report_text(report));
    c.expect(s.xmpp.messages().size() == 1000, "expected 1000 stanzas");
    std::ostringstream time;
    time << elapsed;
    c.expect(elapsed < 30.0, "took " + time.str() + " s");
    std::cerr << "throughput: 1000 messages in " << time.str() << " s\n";
}

} // namespace

int main()
{
    log::set_threshold(log::Level::error);
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
        {"1 type1 end-to-end", end_to_end_type1},
        {"2 dedup across runs", dedup},
        {"3 type2 whitelist", type2_whitelist},
        {"4 pipe exit codes", pipe_mode},
        {"5 crash consistency", crash_consistency},
        {"6 protocol round-trips", round_trips},
        {"7 sasl vector", sasl_vector},
        {"8 throughput 1000 messages", throughput},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria)
    {
        Check check;
        try
        {
            fn(check);
        }
        catch (const std::exception& e)
        {
            check.failures.push_back(std::string("exception: ") + e.what());
        }
        catch (...)
        {
            check.failures.push_back("unknown exception");
        }
        if (check.failures.empty())
        {
            std::cout << "PASS " << name << "\n";
            continue;
        }
        ++failed;
        std::cout << "FAIL " << name << ":";
        for (const auto& f : check.failures)
            std::cout << " " << f << ";";
        std::cout << "\n";
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
