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

#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace mailbridge::log
{

enum class Level
{
    debug,
    info,
    warning,
    error,
};

std::string_view to_string(Level level);

/// Receives fully formatted lines: `level component message`, no trailing newline.
using Sink = std::function<void(Level, std::string_view line)>;

void set_threshold(Level level);
Level threshold();

/// Replaces the process-wide sink and returns the previous one. A null sink restores stderr.
Sink set_sink(Sink sink);

void write(Level level, std::string_view component, std::string_view message);

inline void debug(std::string_view component, std::string_view message) { write(Level::debug, component, message); }
inline void info(std::string_view component, std::string_view message) { write(Level::info, component, message); }
inline void warning(std::string_view component, std::string_view message) { write(Level::warning, component, message); }
inline void error(std::string_view component, std::string_view message) { write(Level::error, component, message); }

/// Routes log output to `out` for the lifetime of the guard.
class ScopedSink
{
public:
    explicit ScopedSink(Sink sink);
    explicit ScopedSink(std::ostream& out);
    ~ScopedSink();

    ScopedSink(const ScopedSink&) = delete;
    ScopedSink& operator=(const ScopedSink&) = delete;

private:
    Sink previous_;
};

} // namespace mailbridge::log
