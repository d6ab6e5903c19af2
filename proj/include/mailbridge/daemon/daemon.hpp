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

#include <atomic>
#include <chrono>
#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "mailbridge/config.hpp"
#include "mailbridge/daemon/state.hpp"
#include "mailbridge/net/transport.hpp"

namespace mailbridge::daemon
{

/// Process exit statuses of the checker modes.
namespace exit_code
{
inline constexpr int ok = 0;
inline constexpr int config = 1;
inline constexpr int mail_transport = 2;
inline constexpr int xmpp_transport = 3;
} // namespace exit_code

struct RunReport
{
    std::size_t listed = 0;
    std::size_t fresh = 0;
    std::size_t forwarded = 0;
    std::size_t skipped = 0;
    std::size_t rejected = 0;
    /// Per-message failures; these messages stay unrecorded and are retried next run.
    std::vector<std::pair<std::string, std::string>> errors;
    /// Accounts that could not be reached at all.
    std::vector<std::pair<std::string, std::string>> account_errors;
    std::string xmpp_error;

    bool arithmetic_holds() const { return fresh == forwarded + skipped + rejected + errors.size(); }
    int exit_status() const;
    /// `listed=3 new=3 forwarded=1 skipped=2 rejected=0 errors=0`
    std::string summary() const;

    RunReport& operator+=(const RunReport& other);
};

/// Phase boundaries of the forward, record, delete sequence for one message.
enum class Phase
{
    after_forward,
    after_state_write,
};

struct RunOptions
{
    net::Connector connector = net::connect;
    /// Route and report only: nothing is sent, recorded or deleted.
    bool dry_run = false;
    /// Receives one `DELIVER`/`SKIP`/`REJECT` line per new message in dry-run mode.
    std::ostream* decisions = nullptr;
    /// Invoked for every forwarded message at each phase boundary.
    std::function<void(Phase, const std::string& account_id, const std::string& uid)> on_phase;
};

/**
One polling pass over every configured account: list, detect new uids,
fetch, route, forward over a single XMPP session, record the disposition,
optionally delete. Each forwarded message is recorded in the state file
before it is deleted, so a crash can duplicate a delivery but never lose
one.
**/
RunReport run_once(const config::Config& config, const RunOptions& options = {});

struct LoopControl
{
    /// Waits for the interval; returns false when the loop should stop instead.
    std::function<bool(std::chrono::seconds)> sleep;
    /// Checked between runs; a run in flight always completes.
    const std::atomic<bool>* stop = nullptr;
    /// Called with each completed report.
    std::function<void(const RunReport&)> on_report;
};

/// Repeats run_once every `interval` until stopped. Returns 0 on a clean stop.
int run_loop(const config::Config& config, std::chrono::seconds interval, const RunOptions& options = {},
             LoopControl control = {});

} // namespace mailbridge::daemon
