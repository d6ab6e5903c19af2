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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mailbridge::daemon
{

enum class Disposition
{
    forwarded,
    skipped,
    rejected,
};

std::string_view to_string(Disposition disposition);
std::optional<Disposition> disposition_from_string(std::string_view text);

/// Messages of one account that have already been dealt with, keyed by uid.
struct MailboxState
{
    std::string account_id;
    std::map<std::string, Disposition> processed;

    /// Records a disposition. An existing record is left untouched; returns whether one was added.
    bool record(const std::string& uid, Disposition disposition);
    bool contains(const std::string& uid) const { return processed.contains(uid); }

    friend bool operator==(const MailboxState&, const MailboxState&) = default;
};

/// All accounts, keyed by account id.
using StateSet = std::map<std::string, MailboxState>;

/**
Returns the uids of `listing` that are not in `state`, in listing order, and
drops state records whose uid is no longer listed.
**/
std::vector<std::string> detect_new(MailboxState& state, const std::vector<std::string>& listing);

/**
State file: UTF-8 text, one `account_id<TAB>uid<TAB>disposition` record per
LF-terminated line. A missing file is an empty state; malformed lines are
skipped with a warning.
**/
StateSet load_state(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it over `path`. Throws io_error.
void save_state(const std::filesystem::path& path, const StateSet& states);

} // namespace mailbridge::daemon
