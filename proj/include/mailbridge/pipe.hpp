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

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "mailbridge/config.hpp"
#include "mailbridge/mail/message.hpp"
#include "mailbridge/net/transport.hpp"
#include "mailbridge/xmpp/jid.hpp"

namespace mailbridge::pipe
{

/// sysexits(3) values understood by MTA pipe transports.
namespace exit_code
{
inline constexpr int ok = 0;
inline constexpr int config = 1;
inline constexpr int data_error = 65;   // EX_DATAERR, permanent
inline constexpr int no_user = 67;      // EX_NOUSER, permanent: the MTA bounces
inline constexpr int temp_failure = 75; // EX_TEMPFAIL: the MTA requeues
} // namespace exit_code

enum class RecipientSource
{
    command_line,
    header,
    subject_directive,
    address_map,
};

struct Resolution
{
    xmpp::Jid recipient;
    RecipientSource source = RecipientSource::command_line;
    /// Subject text after the directive when the recipient came from it.
    std::string residual_subject;
};

/**
First valid candidate wins: the --rcpt value, the X-XMPP-To header, the
subject directive, then the address map entry for a To address. Throws
Error(no_recipient) when none resolves.
**/
Resolution resolve_recipient(const mail::EmailMessage& msg, const std::optional<std::string>& cli_rcpt,
                             const std::map<std::string, xmpp::Jid>& address_map);

inline xmpp::Jid resolve_pipe_recipient(const mail::EmailMessage& msg, const std::optional<std::string>& cli_rcpt,
                                        const std::map<std::string, xmpp::Jid>& address_map)
{
    return resolve_recipient(msg, cli_rcpt, address_map).recipient;
}

struct PipeOptions
{
    std::optional<std::string> rcpt;
    bool dry_run = false;
    std::ostream* decisions = nullptr;
    net::Connector connector = net::connect;
};

/**
Delivers one message read from an MTA: parse, resolve, connect, send one
stanza. Stateless; the exit status is the only result.
**/
int run_pipe(std::string_view input, const config::Config& config, const PipeOptions& options = {});

} // namespace mailbridge::pipe
