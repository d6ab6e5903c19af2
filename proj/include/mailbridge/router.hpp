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
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "mailbridge/mail/message.hpp"
#include "mailbridge/xmpp/jid.hpp"

namespace mailbridge::router
{

enum class CheckerMode
{
    /// shared mailbox; each message names its recipient in the subject
    type1,
    /// a user's own mailbox; everything goes to one recipient
    type2,
};

inline constexpr std::size_t default_max_body_chars = 65536;

struct Whitelist
{
    std::set<std::string> entries;
    bool enabled = false;

    /// Adds a lowercased address; throws config_error unless it holds exactly one '@'.
    void add(std::string_view address);
    bool admits(std::string_view address) const;
};

struct Directive
{
    xmpp::Jid recipient;
    std::string residual;

    friend bool operator==(const Directive&, const Directive&) = default;
};

/// `USER: <jid> rest of subject`, token matched case-insensitively.
std::optional<Directive> parse_subject_directive(std::string_view subject);

struct RouteDecision
{
    enum class Kind
    {
        deliver,
        skip,
        reject,
    };

    Kind kind = Kind::skip;
    xmpp::Jid recipient;
    std::string body;
    std::string reason;

    static RouteDecision deliver(xmpp::Jid to, std::string body);
    static RouteDecision skip(std::string reason);
    static RouteDecision reject(std::string reason);

    friend bool operator==(const RouteDecision&, const RouteDecision&) = default;
};

/// `DELIVER <jid>`, `SKIP <reason>` or `REJECT <reason>`.
std::string describe(const RouteDecision& decision);

RouteDecision route(CheckerMode mode, const mail::EmailMessage& msg, const xmpp::Jid& default_recipient,
                    const Whitelist& whitelist, std::size_t max_body_chars = default_max_body_chars);

std::string format_body(const mail::EmailMessage& msg, std::string_view subject,
                        std::size_t max_body_chars = default_max_body_chars);

} // namespace mailbridge::router
