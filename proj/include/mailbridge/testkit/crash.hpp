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

#include <cstddef>
#include <functional>
#include <string>

#include "mailbridge/daemon/daemon.hpp"

namespace mailbridge::testkit
{

/// Thrown by a crash hook. Deliberately not a std::exception so nothing in the run swallows it.
struct SimulatedCrash
{
    daemon::Phase phase;
    std::string account_id;
    std::string uid;
};

using PhaseHook = std::function<void(daemon::Phase, const std::string& account_id, const std::string& uid)>;

/// Hook for RunOptions::on_phase that aborts the run at the `occurrence`-th boundary of `phase`.
PhaseHook crash_hook(daemon::Phase phase, std::size_t occurrence = 1);

} // namespace mailbridge::testkit
