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

#include "mailbridge/daemon/state.hpp"
#include "support.hpp"

using namespace mailbridge;
using daemon::Disposition;

TEST_CASE("detect_new")
{
    daemon::MailboxState state{"acct", {}};
    CHECK(daemon::detect_new(state, {"a", "b", "c"}) == std::vector<std::string>{"a", "b", "c"});

    state.record("a", Disposition::forwarded);
    state.record("b", Disposition::skipped);
    CHECK(daemon::detect_new(state, {"a", "b", "c"}) == std::vector<std::string>{"c"});

    state.record("c", Disposition::rejected);
    CHECK(daemon::detect_new(state, {"b", "c"}).empty());
    CHECK(state.processed.size() == 2);
    CHECK_FALSE(state.contains("a"));
}

TEST_CASE("dispositions are immutable")
{
    daemon::MailboxState state{"acct", {}};
    CHECK(state.record("u", Disposition::forwarded));
    CHECK_FALSE(state.record("u", Disposition::skipped));
    CHECK(state.processed.at("u") == Disposition::forwarded);
}

TEST_CASE("state file round trip and format")
{
    test::TempDir dir;
    const auto path = dir / "state";
    CHECK(daemon::load_state(path).empty());

    daemon::StateSet states;
    states["shared"] = {"shared", {{"1", Disposition::forwarded}, {"2", Disposition::skipped}}};
    states["own"] = {"own", {{"x y", Disposition::rejected}}};
    daemon::save_state(path, states);
    CHECK(daemon::load_state(path) == states);

    const std::string text = test::read_file(path);
    CHECK(text.find("shared\t1\tforwarded\n") != std::string::npos);
    CHECK(text.find("own\tx y\trejected\n") != std::string::npos);
    CHECK(text.find('\r') == std::string::npos);
    CHECK_FALSE(std::filesystem::exists(dir / "state.tmp"));
}

TEST_CASE("corrupt lines are skipped with a warning")
{
    test::TempDir dir;
    test::write_file(dir / "state", "a\t1\tforwarded\nbroken\na\t2\tbogus\na\t3\tskipped\n");
    test::LogCapture logs;
    const auto states = daemon::load_state(dir / "state");
    REQUIRE(states.count("a") == 1);
    CHECK(states.at("a").processed.size() == 2);
    CHECK(logs.text().find("warning") != std::string::npos);
}

TEST_CASE("saving refuses fields that would break the format")
{
    test::TempDir dir;
    daemon::StateSet states;
    states["a"] = {"a", {{"bad\tuid", Disposition::forwarded}}};
    CHECK_THROWS_AS(daemon::save_state(dir / "state", states), Error);
    CHECK_THROWS_AS(daemon::save_state(dir / "missing-dir" / "state", {}), Error);
}
