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

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <thread>

#include <cstdlib>

#include "mailbridge/cli.hpp"
#include "mailbridge/daemon/state.hpp"
#include "support.hpp"

using namespace mailbridge;
using testkit::MockMailServer;
using testkit::MockXmppServer;
using testkit::make_message;

namespace
{

struct Result
{
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args, std::string input = {})
{
    std::istringstream in(input);
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::main(args, in, out, err);
    return {code, out.str(), err.str()};
}

std::string config_text(const MockXmppServer& xmpp, const MockMailServer* mail, const std::string& mode,
                        const std::filesystem::path& state)
{
    std::string text = "[general]\nmode = " + mode + "\nstate_path = " + state.string() + "\n" +
                       "[xmpp]\njid = alerts@example.org\npassword = secret\nhost = 127.0.0.1\nport = " +
                       std::to_string(xmpp.port()) + "\n";
    if (mail)
        text += "[account shared]\nprotocol = imap\nhost = 127.0.0.1\nport = " + std::to_string(mail->port()) +
                "\nusername = user\npassword = secret\ndefault_recipient = owner@example.org\n";
    return text;
}

} // namespace

TEST_CASE("once prints the report")
{
    test::TempDir dir;
    MockXmppServer xmpp;
    MockMailServer mail(mail::Protocol::imap);
    mail.plant(make_message("1", "x@y", "z@w", "USER: a@b hi", "one"));
    test::write_file(dir / "c.ini", config_text(xmpp, &mail, "type1", dir / "state"));

    const auto r = run({"--config", (dir / "c.ini").string(), "--once"});
    CHECK(r.code == 0);
    CHECK(r.out == "listed=1 new=1 forwarded=1 skipped=0 rejected=0 errors=0\n");
    CHECK(r.err.find("secret") == std::string::npos);
}

TEST_CASE("mode flag overrides the file")
{
    test::TempDir dir;
    MockXmppServer xmpp;
    MockMailServer mail(mail::Protocol::imap);
    mail.plant(make_message("1", "x@y", "z@w", "no directive", "one"));
    test::write_file(dir / "c.ini", config_text(xmpp, &mail, "type1", dir / "state"));

    const auto r = run({"--config", (dir / "c.ini").string(), "--mode", "type2", "--once"});
    CHECK(r.code == 0);
    xmpp.wait_idle();
    REQUIRE(xmpp.messages().size() == 1);
    CHECK(xmpp.messages()[0].attribute("to") == "owner@example.org");
}

TEST_CASE("dry run prints decisions and leaves everything alone")
{
    test::TempDir dir;
    MockXmppServer xmpp;
    MockMailServer mail(mail::Protocol::imap);
    mail.plant(make_message("1", "x@y", "z@w", "USER: a@b hi", "one"));
    mail.plant(make_message("2", "x@y", "z@w", "hello", "two"));
    test::write_file(dir / "c.ini", config_text(xmpp, &mail, "type1", dir / "state"));
    daemon::save_state(dir / "state", {{"other", {"other", {{"9", daemon::Disposition::skipped}}}}});
    const std::string state_before = test::read_file(dir / "state");

    const auto r = run({"--config", (dir / "c.ini").string(), "--once", "--dry-run"});
    CHECK(r.code == 0);
    CHECK(r.out == "DELIVER a@b\nSKIP no directive\n");
    CHECK(xmpp.transcript().empty());
    CHECK(test::read_file(dir / "state") == state_before);
    CHECK(mail.mailbox().size() == 2);
}

TEST_CASE("argument errors")
{
    auto r = run({"--bogus"});
    CHECK(r.code == 1);
    CHECK(r.err.find("Usage") != std::string::npos);

    r = run({"--config", "/nonexistent/c.ini", "--once"});
    CHECK(r.code == 1);

    r = run({"--config", "x", "--mode", "type7"});
    CHECK(r.code == 1);

    r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("--rcpt") != std::string::npos);
}

TEST_CASE("state flag overrides the file")
{
    test::TempDir dir;
    MockXmppServer xmpp;
    MockMailServer mail(mail::Protocol::imap);
    mail.plant(make_message("1", "x@y", "z@w", "USER: a@b hi", "one"));
    test::write_file(dir / "c.ini", config_text(xmpp, &mail, "type1", dir / "unused"));
    CHECK(run({"--config", (dir / "c.ini").string(), "--once", "--state", (dir / "elsewhere").string()}).code == 0);
    CHECK(std::filesystem::exists(dir / "elsewhere"));
    CHECK_FALSE(std::filesystem::exists(dir / "unused"));
}

TEST_CASE("verbose logging goes to stderr in the documented format")
{
    test::TempDir dir;
    MockXmppServer xmpp;
    MockMailServer mail(mail::Protocol::imap);
    test::write_file(dir / "c.ini", config_text(xmpp, &mail, "type1", dir / "state"));
    const auto r = run({"--config", (dir / "c.ini").string(), "--once", "--verbose"});
    CHECK(r.code == 0);
    CHECK(r.err.find("debug ") != std::string::npos);
    CHECK(r.err.find("secret") == std::string::npos);
    std::istringstream lines(r.err);
    for (std::string line; std::getline(lines, line);)
    {
        const auto space = line.find(' ');
        REQUIRE(space != std::string::npos);
        const auto level = line.substr(0, space);
        CHECK((level == "debug" || level == "info" || level == "warning" || level == "error"));
    }
}

TEST_CASE("pipe mode through the real binary")
{
    test::TempDir dir;
    MockXmppServer xmpp;
    test::write_file(dir / "c.ini", config_text(xmpp, nullptr, "pipe", dir / "state"));
    test::write_file(dir / "msg", "From: a@b\r\nSubject: s\r\n\r\nhello\r\n");

    const std::string command = std::string(MAILBRIDGE_BINARY) + " --config " + (dir / "c.ini").string() +
                                " --mode pipe --rcpt bob@example.org < " + (dir / "msg").string() + " > " +
                                (dir / "out").string() + " 2> " + (dir / "err").string();
    const int status = std::system(command.c_str());
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(test::read_file(dir / "out").empty());
    xmpp.wait_idle();
    REQUIRE(xmpp.messages().size() == 1);
    CHECK(xmpp.messages()[0].attribute("to") == "bob@example.org");

    const int empty = std::system((std::string(MAILBRIDGE_BINARY) + " --config " + (dir / "c.ini").string() +
                                   " --mode pipe < /dev/null 2>/dev/null")
                                      .c_str());
    CHECK(WEXITSTATUS(empty) == 65);
}

TEST_CASE("interval mode stops cleanly on SIGTERM")
{
    test::TempDir dir;
    MockXmppServer xmpp;
    MockMailServer mail(mail::Protocol::imap);
    mail.plant(make_message("1", "x@y", "z@w", "USER: a@b hi", "one"));
    test::write_file(dir / "c.ini", config_text(xmpp, &mail, "type1", dir / "state"));
    const std::string config_path = (dir / "c.ini").string();

    const pid_t pid = ::fork();
    REQUIRE(pid >= 0);
    if (pid == 0)
    {
        const int null_fd = ::open("/dev/null", O_WRONLY);
        ::dup2(null_fd, STDOUT_FILENO);
        ::dup2(null_fd, STDERR_FILENO);
        ::execl(MAILBRIDGE_BINARY, "mailbridge", "--config", config_path.c_str(), "--interval", "1",
                static_cast<char*>(nullptr));
        ::_exit(127);
    }

    // wait for the first pass to forward the message, then interrupt the sleep
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(10);
    while (xmpp.messages().empty() && std::chrono::steady_clock::now() < deadline)
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    CHECK(xmpp.messages().size() == 1);
    ::kill(pid, SIGTERM);
    int status = 0;
    ::waitpid(pid, &status, 0);
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
}
