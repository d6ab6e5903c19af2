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
#include "mailbridge/pipe.hpp"

#include "mailbridge/codec.hpp"
#include "mailbridge/log.hpp"
#include "mailbridge/router.hpp"
#include "mailbridge/xmpp/client.hpp"

namespace mailbridge::pipe
{

namespace
{

constexpr std::string_view component = "pipe";

std::optional<xmpp::Jid> try_jid(std::string_view candidate, std::string_view source)
{
    const std::string_view trimmed = codec::trim(candidate);
    if (trimmed.empty())
        return std::nullopt;
    try
    {
        return xmpp::parse_jid(trimmed);
    }
    catch (const Error& e)
    {
        log::warning(component, "ignoring " + std::string(source) + ": " + e.what());
        return std::nullopt;
    }
}

// Comma-separated address list, ignoring commas inside quotes and angle brackets.
std::vector<std::string> split_addresses(std::string_view header)
{
    std::vector<std::string> out;
    bool quoted = false;
    int angle = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= header.size(); ++i)
    {
        const char c = i < header.size() ? header[i] : ',';
        if (c == '"')
            quoted = !quoted;
        else if (!quoted && c == '<')
            ++angle;
        else if (!quoted && c == '>' && angle > 0)
            --angle;
        else if (c == ',' && !quoted && angle == 0)
        {
            const auto address = mail::extract_address(header.substr(start, i - start));
            if (!address.empty())
                out.push_back(address);
            start = i + 1;
        }
    }
    return out;
}

} // namespace

Resolution resolve_recipient(const mail::EmailMessage& msg, const std::optional<std::string>& cli_rcpt,
                             const std::map<std::string, xmpp::Jid>& address_map)
{
    if (cli_rcpt)
        if (auto jid = try_jid(*cli_rcpt, "--rcpt"))
            return {*jid, RecipientSource::command_line, {}};

    if (auto jid = try_jid(msg.header("X-XMPP-To"), "X-XMPP-To header"))
        return {*jid, RecipientSource::header, {}};

    if (auto directive = router::parse_subject_directive(msg.subject))
        return {directive->recipient, RecipientSource::subject_directive, directive->residual};

    for (const auto& address : split_addresses(msg.to))
        if (const auto it = address_map.find(address); it != address_map.end())
            return {it->second, RecipientSource::address_map, {}};

    throw Error(ErrorKind::no_recipient, "no XMPP recipient could be resolved for this message");
}

int run_pipe(std::string_view input, const config::Config& config, const PipeOptions& options)
{
    if (codec::trim(input).empty())
    {
        log::error(component, "empty input");
        return exit_code::data_error;
    }
    mail::EmailMessage msg = mail::parse_rfc5322(input);
    if (msg.headers.empty())
    {
        log::error(component, "input carries no RFC 5322 headers");
        return exit_code::data_error;
    }
    msg.body_text = mail::extract_text_body(input, msg);

    Resolution resolution;
    try
    {
        resolution = resolve_recipient(msg, options.rcpt, config.address_map);
    }
    catch (const Error& e)
    {
        log::error(component, e.what());
        if (options.dry_run && options.decisions)
            *options.decisions << "SKIP no recipient\n";
        return exit_code::no_user;
    }

    if (config.whitelist.enabled && !config.whitelist.admits(mail::extract_address(msg.from)))
    {
        log::warning(component, "sender " + mail::extract_address(msg.from) + " is not whitelisted");
        if (options.dry_run && options.decisions)
            *options.decisions << "REJECT sender not whitelisted\n";
        return config.pipe_reject_exit;
    }

    const std::string subject =
        resolution.source == RecipientSource::subject_directive ? resolution.residual_subject : msg.subject;
    const xmpp::Stanza stanza = xmpp::build_message_stanza(
        resolution.recipient, router::format_body(msg, subject, config.max_body_chars), config.message_type);

    if (options.dry_run)
    {
        if (options.decisions)
            *options.decisions << "DELIVER " << resolution.recipient.str() << '\n';
        return exit_code::ok;
    }

    try
    {
        auto client = xmpp::connect_client(config.xmpp, options.connector);
        client->send(stanza);
        client->close();
    }
    catch (const Error& e)
    {
        log::error(component, std::string("XMPP delivery failed: ") + e.what());
        return e.kind() == ErrorKind::config_error ? exit_code::config : exit_code::temp_failure;
    }
    log::info(component, "delivered to " + resolution.recipient.str());
    return exit_code::ok;
}

} // namespace mailbridge::pipe
