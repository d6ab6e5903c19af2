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

#include <stdexcept>
#include <string>
#include <string_view>

namespace mailbridge
{

enum class ErrorKind
{
    auth_failure,
    protocol_error,
    transport_error,
    unknown_uid,
    config_error,
    invalid_jid,
    stream_error,
    malformed_xml,
    bind_failure,
    precondition,
    no_recipient,
    io_error,
};

std::string_view to_string(ErrorKind kind);

/**
Failure raised by every mailbridge component. The kind drives exit codes and
retry decisions; the message is for humans and never carries secrets.
**/
class Error : public std::runtime_error
{
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ConfigError : public Error
{
public:
    ConfigError(std::string section, std::string key, const std::string& reason)
        : Error(ErrorKind::config_error, "[" + section + "] " + key + ": " + reason),
          section_(std::move(section)), key_(std::move(key))
    {
    }

    const std::string& section() const noexcept { return section_; }
    const std::string& key() const noexcept { return key_; }

private:
    std::string section_;
    std::string key_;
};

/// A password or other credential. Streams and diagnostics only ever see "***".
class Secret
{
public:
    Secret() = default;
    explicit Secret(std::string value) : value_(std::move(value)) {}

    const std::string& reveal() const noexcept { return value_; }
    bool empty() const noexcept { return value_.empty(); }

    friend bool operator==(const Secret&, const Secret&) = default;

private:
    std::string value_;
};

inline constexpr std::string_view redacted = "***";

} // namespace mailbridge
