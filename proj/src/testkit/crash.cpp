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
#include "mailbridge/testkit/crash.hpp"

#include <memory>

namespace mailbridge::testkit
{

PhaseHook crash_hook(daemon::Phase phase, std::size_t occurrence)
{
    auto seen = std::make_shared<std::size_t>(0);
    return [=](daemon::Phase p, const std::string& account_id, const std::string& uid) {
        if (p == phase && ++*seen == occurrence)
            throw SimulatedCrash{p, account_id, uid};
    };
}

} // namespace mailbridge::testkit
