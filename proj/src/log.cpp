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
#include "mailbridge/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

#include "mailbridge/error.hpp"

namespace mailbridge
{

std::string_view to_string(ErrorKind kind)
{
    switch (kind)
    {
    case ErrorKind::auth_failure: return "auth-failure";
    case ErrorKind::protocol_error: return "protocol-error";
    case ErrorKind::transport_error: return "transport-error";
    case ErrorKind::unknown_uid: return "unknown-uid";
    case ErrorKind::config_error: return "config-error";
    case ErrorKind::invalid_jid: return "invalid-jid";
    case ErrorKind::stream_error: return "stream-error";
    case ErrorKind::malformed_xml: return "malformed-xml";
    case ErrorKind::bind_failure: return "bind-failure";
    case ErrorKind::precondition: return "precondition-violation";
    case ErrorKind::no_recipient: return "no-recipient";
    case ErrorKind::io_error: return "io-error";
    }
    return "unknown";
}

namespace log
{

namespace
{

std::mutex sink_mutex;
Sink current_sink;
std::atomic<Level> current_threshold{Level::info};

} // namespace

std::string_view to_string(Level level)
{
    switch (level)
    {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warning: return "warning";
    case Level::error: return "error";
    }
    return "unknown";
}

void set_threshold(Level level)
{
    current_threshold = level;
}

Level threshold()
{
    return current_threshold;
}

Sink set_sink(Sink sink)
{
    std::lock_guard lock(sink_mutex);
    std::swap(current_sink, sink);
    return sink;
}

void write(Level level, std::string_view component, std::string_view message)
{
    if (level < current_threshold.load())
        return;

    std::string line;
    line.reserve(message.size() + component.size() + 10);
    line.append(to_string(level)).append(" ").append(component).append(" ");
    // one event per line
    for (char c : message)
        line.push_back(c == '\n' || c == '\r' ? ' ' : c);

    std::lock_guard lock(sink_mutex);
    if (current_sink)
        current_sink(level, line);
    else
        std::cerr << line << '\n';
}

ScopedSink::ScopedSink(Sink sink) : previous_(set_sink(std::move(sink)))
{
}

ScopedSink::ScopedSink(std::ostream& out)
    : previous_(set_sink([&out](Level, std::string_view line) { out << line << '\n'; }))
{
}

ScopedSink::~ScopedSink()
{
    set_sink(std::move(previous_));
}

} // namespace log
} // namespace mailbridge
