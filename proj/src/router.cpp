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
#include "mailbridge/router.hpp"

#include <algorithm>

#include "mailbridge/codec.hpp"
#include "mailbridge/error.hpp"
#include "mailbridge/log.hpp"

namespace mailbridge::router
{

namespace
{

constexpr std::string_view directive_token = "USER:";
constexpr std::string_view truncation_suffix = "\n[truncated]";

} // namespace

void Whitelist::add(std::string_view address)
{
    const std::string normalized = codec::ascii_lower(codec::trim(address));
    if (std::count(normalized.begin(), normalized.end(), '@') != 1)
        throw ConfigError("whitelist", "senders", "'" + normalized + "' is not an email address");
    entries.insert(normalized);
}

bool Whitelist::admits(std::string_view address) const
{
    return entries.contains(codec::ascii_lower(address));
}

std::optional<Directive> parse_subject_directive(std::string_view subject)
{
    std::string_view rest = subject;
    while (!rest.empty() && codec::is_space(rest.front()))
        rest.remove_prefix(1);
    if (!codec::istarts_with(rest, directive_token))
        return std::nullopt;
    rest.remove_prefix(directive_token.size());
    while (!rest.empty() && codec::is_space(rest.front()))
        rest.remove_prefix(1);

    std::size_t end = 0;
    while (end < rest.size() && !codec::is_space(rest[end]))
        ++end;
    const std::string_view token = rest.substr(0, end);
    if (token.empty())
    {
        log::warning("router", "USER: directive without a JID");
        return std::nullopt;
    }
    try
    {
        return Directive{xmpp::parse_jid(token), std::string(codec::trim(rest.substr(end)))};
    }
    catch (const Error& e)
    {
        log::warning("router", std::string("ignoring USER: directive: ") + e.what());
        return std::nullopt;
    }
}

RouteDecision RouteDecision::deliver(xmpp::Jid to, std::string body)
{
    RouteDecision d;
    d.kind = Kind::deliver;
    d.recipient = std::move(to);
    d.body = std::move(body);
    return d;
}

RouteDecision RouteDecision::skip(std::string reason)
{
    RouteDecision d;
    d.kind = Kind::skip;
    d.reason = std::move(reason);
    return d;
}

RouteDecision RouteDecision::reject(std::string reason)
{
    RouteDecision d;
    d.kind = Kind::reject;
    d.reason = std::move(reason);
    return d;
}

std::string describe(const RouteDecision& decision)
{
    switch (decision.kind)
    {
    case RouteDecision::Kind::deliver: return "DELIVER " + decision.recipient.str();
    case RouteDecision::Kind::skip: return "SKIP " + decision.reason;
    case RouteDecision::Kind::reject: return "REJECT " + decision.reason;
    }
    return {};
}

RouteDecision route(CheckerMode mode, const mail::EmailMessage& msg, const xmpp::Jid& default_recipient,
                    const Whitelist& whitelist, std::size_t max_body_chars)
{
    if (mode == CheckerMode::type1)
    {
        auto directive = parse_subject_directive(msg.subject);
        if (!directive)
            return RouteDecision::skip("no directive");
        return RouteDecision::deliver(std::move(directive->recipient),
                                      format_body(msg, directive->residual, max_body_chars));
    }

    if (whitelist.enabled && !whitelist.admits(mail::extract_address(msg.from)))
        return RouteDecision::reject("sender not whitelisted");
    return RouteDecision::deliver(default_recipient, format_body(msg, msg.subject, max_body_chars));
}

std::string format_body(const mail::EmailMessage& msg, std::string_view subject, std::size_t max_body_chars)
{
    std::string out;
    out.reserve(msg.from.size() + subject.size() + msg.date.size() + msg.body_text.size() + 32);
    out.append("From: ").append(msg.from);
    out.append("\nSubject: ").append(subject);
    out.append("\nDate: ").append(msg.date);
    out.append("\n\n");
    out.append(msg.body_text.empty() ? mail::no_text_content : std::string_view(msg.body_text));

    if (codec::utf8_length(out) > max_body_chars)
    {
        out.resize(codec::utf8_prefix(out, max_body_chars).size());
        out.append(truncation_suffix);
    }
    return out;
}

} // namespace mailbridge::router
