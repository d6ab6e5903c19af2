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
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mailbridge/mail/message.hpp"
#include "mailbridge/router.hpp"
#include "mailbridge/xmpp/client.hpp"

namespace mailbridge::config
{

enum class Mode
{
    type1,
    type2,
    pipe,
};

std::string_view to_string(Mode mode);
std::optional<Mode> mode_from_string(std::string_view text);

struct AccountConfig
{
    /// Section name, also the account id in the state file.
    std::string name;
    mail::MailAccount mail;
    std::optional<xmpp::Jid> default_recipient;
};

struct Config
{
    Mode mode = Mode::type1;
    xmpp::XmppAccount xmpp;
    std::vector<AccountConfig> accounts;
    router::Whitelist whitelist;
    bool delete_after_forward = false;
    std::size_t max_body_chars = router::default_max_body_chars;
    std::string message_type = "normal";
    bool allow_insecure = false;
    std::filesystem::path state_path;
    /// Lowercased email address to recipient, consulted in pipe mode.
    std::map<std::string, xmpp::Jid> address_map;
    /// Exit status when pipe mode rejects a sender: 67 bounces, 0 drops silently.
    int pipe_reject_exit = 67;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string& name)>;

std::optional<std::string> system_env(const std::string& name);

/// Environment variable that overrides the password of account `name`.
std::string account_password_variable(std::string_view name);

/**
Parses the INI-style configuration:

    [general]        mode, state_path, delete_after_forward, max_body_chars,
                     message_type, allow_insecure, pipe_reject_exit
    [xmpp]           jid, password, host, port, resource, tls
    [account NAME]   protocol, host, port, username, password, mailbox, tls,
                     default_recipient
    [whitelist]      enabled, senders (comma or space separated, repeatable)
    [map]            address = jid

`mode_override` takes precedence over the file's mode. Passwords from
MAILBRIDGE_XMPP_PASSWORD and MAILBRIDGE_MAIL_PASSWORD_<NAME> override the
file. Throws ConfigError naming the section and key.
**/
Config parse_config(std::string_view text, std::optional<Mode> mode_override = std::nullopt,
                    const EnvLookup& env = system_env);

Config load_config(const std::filesystem::path& path, std::optional<Mode> mode_override = std::nullopt,
                   const EnvLookup& env = system_env);

} // namespace mailbridge::config
