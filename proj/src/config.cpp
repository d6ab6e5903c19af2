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
#include "mailbridge/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mailbridge/codec.hpp"
#include "mailbridge/log.hpp"

namespace mailbridge::config
{

namespace
{

constexpr std::string_view component = "config";

struct Entry
{
    std::string key;
    std::string value;
    std::size_t line = 0;
};

struct Section
{
    std::string kind;
    std::string name;
    std::vector<Entry> entries;
    std::size_t line = 0;

    std::string label() const { return name.empty() ? kind : kind + " " + name; }
};

std::optional<std::string> get(const Section& section, std::string_view key)
{
    std::optional<std::string> result;
    for (const auto& e : section.entries)
        if (e.key == key)
            result = e.value;
    return result;
}

std::string require(const Section& section, std::string_view key)
{
    auto value = get(section, key);
    if (!value || value->empty())
        throw ConfigError(section.label(), std::string(key), "missing required value");
    return *value;
}

bool parse_bool(const Section& section, std::string_view key, std::string_view value)
{
    const std::string v = codec::ascii_lower(value);
    if (v == "true" || v == "yes" || v == "on" || v == "1")
        return true;
    if (v == "false" || v == "no" || v == "off" || v == "0")
        return false;
    throw ConfigError(section.label(), std::string(key), "expected true or false, got '" + std::string(value) + "'");
}

long long parse_integer(const Section& section, std::string_view key, std::string_view value, long long lo,
                        long long hi)
{
    long long n = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
    if (value.empty() || ec != std::errc() || ptr != value.data() + value.size() || n < lo || n > hi)
        throw ConfigError(section.label(), std::string(key),
                          "expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got '" +
                              std::string(value) + "'");
    return n;
}

net::TlsMode parse_tls(const Section& section, std::string_view value)
{
    const std::string v = codec::ascii_lower(value);
    if (v == "none")
        return net::TlsMode::none;
    if (v == "implicit")
        return net::TlsMode::implicit;
    throw ConfigError(section.label(), "tls", "expected none or implicit, got '" + std::string(value) + "'");
}

xmpp::Jid parse_jid_value(const Section& section, std::string_view key, std::string_view value)
{
    try
    {
        return xmpp::parse_jid(value);
    }
    catch (const Error& e)
    {
        throw ConfigError(section.label(), std::string(key), e.what());
    }
}

void warn_unknown(const Section& section, std::initializer_list<std::string_view> known)
{
    for (const auto& e : section.entries)
    {
        bool found = false;
        for (auto k : known)
            found = found || e.key == k;
        if (!found)
            log::warning(component, "[" + section.label() + "] unknown key '" + e.key + "' on line " +
                                        std::to_string(e.line));
    }
}

std::string strip_quotes(std::string_view value)
{
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
        value = value.substr(1, value.size() - 2);
    return std::string(value);
}

std::vector<Section> split_sections(std::string_view text)
{
    std::vector<Section> sections;
    sections.push_back({"general", "", {}, 0});
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos <= text.size())
    {
        const auto nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const std::string_view line = codec::trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';')
            continue;
        if (line.front() == '[')
        {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no), "", "unterminated section header");
            const std::string_view inner = codec::trim(line.substr(1, line.size() - 2));
            const auto sp = inner.find_first_of(" \t");
            Section section;
            section.kind = codec::ascii_lower(inner.substr(0, sp));
            if (sp != std::string_view::npos)
                section.name = std::string(codec::trim(inner.substr(sp)));
            section.line = line_no;
            if (section.kind.empty())
                throw ConfigError("line " + std::to_string(line_no), "", "empty section header");
            sections.push_back(std::move(section));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(sections.back().label(), std::string(line.substr(0, 40)),
                              "expected 'key = value' on line " + std::to_string(line_no));
        const std::string key = codec::ascii_lower(codec::trim(line.substr(0, eq)));
        if (key.empty())
            throw ConfigError(sections.back().label(), "", "empty key on line " + std::to_string(line_no));
        sections.back().entries.push_back({key, strip_quotes(codec::trim(line.substr(eq + 1))), line_no});
    }
    return sections;
}

} // namespace

std::string_view to_string(Mode mode)
{
    switch (mode)
    {
    case Mode::type1: return "type1";
    case Mode::type2: return "type2";
    case Mode::pipe: return "pipe";
    }
    return "";
}

std::optional<Mode> mode_from_string(std::string_view text)
{
    const std::string v = codec::ascii_lower(codec::trim(text));
    if (v == "type1")
        return Mode::type1;
    if (v == "type2")
        return Mode::type2;
    if (v == "pipe")
        return Mode::pipe;
    return std::nullopt;
}

std::optional<std::string> system_env(const std::string& name)
{
    if (const char* value = std::getenv(name.c_str()))
        return std::string(value);
    return std::nullopt;
}

std::string account_password_variable(std::string_view name)
{
    std::string var = "MAILBRIDGE_MAIL_PASSWORD_";
    for (char c : name)
    {
        if (c >= 'a' && c <= 'z')
            var.push_back(static_cast<char>(c - 'a' + 'A'));
        else if ((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'))
            var.push_back(c);
        else
            var.push_back('_');
    }
    return var;
}

Config parse_config(std::string_view text, std::optional<Mode> mode_override, const EnvLookup& env)
{
    Config config;
    const std::vector<Section> sections = split_sections(text);
    const Section* xmpp_section = nullptr;
    std::optional<Mode> file_mode;

    for (const auto& section : sections)
    {
        if (section.kind == "general")
        {
            warn_unknown(section, {"mode", "state_path", "delete_after_forward", "max_body_chars", "message_type",
                                   "allow_insecure", "pipe_reject_exit"});
            if (auto v = get(section, "mode"))
            {
                file_mode = mode_from_string(*v);
                if (!file_mode)
                    throw ConfigError("general", "mode", "expected type1, type2 or pipe, got '" + *v + "'");
            }
            if (auto v = get(section, "state_path"))
                config.state_path = *v;
            if (auto v = get(section, "delete_after_forward"))
                config.delete_after_forward = parse_bool(section, "delete_after_forward", *v);
            if (auto v = get(section, "max_body_chars"))
                config.max_body_chars =
                    static_cast<std::size_t>(parse_integer(section, "max_body_chars", *v, 1, 1LL << 40));
            if (auto v = get(section, "message_type"))
            {
                if (v->empty())
                    throw ConfigError("general", "message_type", "must not be empty");
                config.message_type = *v;
            }
            if (auto v = get(section, "allow_insecure"))
                config.allow_insecure = parse_bool(section, "allow_insecure", *v);
            if (auto v = get(section, "pipe_reject_exit"))
            {
                config.pipe_reject_exit = static_cast<int>(parse_integer(section, "pipe_reject_exit", *v, 0, 67));
                if (config.pipe_reject_exit != 0 && config.pipe_reject_exit != 67)
                    throw ConfigError("general", "pipe_reject_exit", "expected 67 or 0");
            }
        }
        else if (section.kind == "xmpp")
        {
            if (xmpp_section)
                throw ConfigError("xmpp", "", "section appears twice");
            xmpp_section = &section;
        }
        else if (section.kind == "account")
        {
            if (section.name.empty())
                throw ConfigError("account", "", "account sections need a name: [account NAME]");
            for (const auto& existing : config.accounts)
                if (existing.name == section.name)
                    throw ConfigError(section.label(), "", "duplicate account name");
            warn_unknown(section, {"protocol", "host", "port", "username", "password", "mailbox", "tls",
                                   "default_recipient"});

            AccountConfig account;
            account.name = section.name;
            const std::string protocol = codec::ascii_lower(require(section, "protocol"));
            if (protocol == "pop3")
                account.mail.protocol = mail::Protocol::pop3;
            else if (protocol == "imap")
                account.mail.protocol = mail::Protocol::imap;
            else
                throw ConfigError(section.label(), "protocol", "expected pop3 or imap, got '" + protocol + "'");
            account.mail.host = require(section, "host");
            account.mail.username = require(section, "username");
            if (auto v = get(section, "tls"))
                account.mail.tls = parse_tls(section, *v);
            const bool pop3 = account.mail.protocol == mail::Protocol::pop3;
            const bool tls = account.mail.tls == net::TlsMode::implicit;
            account.mail.port = pop3 ? (tls ? 995 : 110) : (tls ? 993 : 143);
            if (auto v = get(section, "port"))
                account.mail.port = static_cast<std::uint16_t>(parse_integer(section, "port", *v, 1, 65535));
            if (auto v = get(section, "mailbox"))
            {
                if (v->empty())
                    throw ConfigError(section.label(), "mailbox", "must not be empty");
                account.mail.mailbox = *v;
            }

            std::optional<std::string> password = env(account_password_variable(section.name));
            if (!password)
                password = get(section, "password");
            if (!password)
                throw ConfigError(section.label(), "password", "missing required value");
            account.mail.password = Secret(*password);

            if (auto v = get(section, "default_recipient"); v && !v->empty())
                account.default_recipient = parse_jid_value(section, "default_recipient", *v);
            config.accounts.push_back(std::move(account));
        }
        else if (section.kind == "whitelist")
        {
            warn_unknown(section, {"enabled", "senders"});
            for (const auto& e : section.entries)
            {
                if (e.key != "senders")
                    continue;
                std::string list = e.value;
                for (char& c : list)
                    if (c == ',' || c == ';')
                        c = ' ';
                std::istringstream words(list);
                std::string address;
                while (words >> address)
                    config.whitelist.add(address);
            }
            config.whitelist.enabled = true;
            if (auto v = get(section, "enabled"))
                config.whitelist.enabled = parse_bool(section, "enabled", *v);
        }
        else if (section.kind == "map")
        {
            for (const auto& e : section.entries)
            {
                if (std::count(e.key.begin(), e.key.end(), '@') != 1)
                    throw ConfigError("map", e.key, "keys must be email addresses");
                config.address_map[e.key] = parse_jid_value(section, e.key, e.value);
            }
        }
        else
        {
            log::warning(component, "unknown section [" + section.label() + "] on line " +
                                        std::to_string(section.line));
        }
    }

    if (mode_override)
        config.mode = *mode_override;
    else if (file_mode)
        config.mode = *file_mode;
    else
        throw ConfigError("general", "mode", "missing required value (set it here or pass --mode)");

    if (!xmpp_section)
        throw ConfigError("xmpp", "jid", "missing required value");
    const Section& xs = *xmpp_section;
    warn_unknown(xs, {"jid", "password", "host", "port", "resource", "tls"});
    config.xmpp.jid = parse_jid_value(xs, "jid", require(xs, "jid")).bare();
    if (config.xmpp.jid.localpart().empty())
        throw ConfigError("xmpp", "jid", "the sending account needs a localpart");
    std::optional<std::string> xmpp_password = env("MAILBRIDGE_XMPP_PASSWORD");
    if (!xmpp_password)
        xmpp_password = get(xs, "password");
    if (!xmpp_password || xmpp_password->empty())
        throw ConfigError("xmpp", "password", "missing required value");
    config.xmpp.password = Secret(*xmpp_password);
    config.xmpp.host = get(xs, "host").value_or(config.xmpp.jid.domain());
    if (config.xmpp.host.empty())
        config.xmpp.host = config.xmpp.jid.domain();
    if (auto v = get(xs, "port"))
        config.xmpp.port = static_cast<std::uint16_t>(parse_integer(xs, "port", *v, 1, 65535));
    if (auto v = get(xs, "resource"))
        config.xmpp.resource = *v;
    if (auto v = get(xs, "tls"))
        config.xmpp.tls = parse_tls(xs, *v);
    config.xmpp.allow_insecure = config.allow_insecure;

    if (config.mode != Mode::pipe && config.accounts.empty())
        throw ConfigError("account", "", "mode " + std::string(to_string(config.mode)) + " needs at least one account");
    if (config.mode == Mode::type2)
        for (const auto& account : config.accounts)
            if (!account.default_recipient)
                throw ConfigError("account " + account.name, "default_recipient", "required in type2 mode");

    return config;
}

Config load_config(const std::filesystem::path& path, std::optional<Mode> mode_override, const EnvLookup& env)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("file", path.string(), "cannot be read");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), mode_override, env);
}

} // namespace mailbridge::config
