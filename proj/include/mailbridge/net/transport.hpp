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

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace mailbridge::net
{

/// Bidirectional byte stream. Implementations throw Error(transport_error) on failure.
class Transport
{
public:
    virtual ~Transport() = default;

    /// Reads at least one octet, or returns 0 at end of stream.
    virtual std::size_t read_some(std::span<char> buffer) = 0;
    virtual void write_all(std::string_view data) = 0;
    /// Half-closes the sending direction where supported.
    virtual void shutdown_write() {}
};

enum class TlsMode
{
    none,
    implicit,
};

struct Endpoint
{
    std::string host;
    std::uint16_t port = 0;
    TlsMode tls = TlsMode::none;
    std::chrono::milliseconds timeout{30000};
};

using Connector = std::function<std::unique_ptr<Transport>(const Endpoint&)>;

/// Plain TCP, wrapped in TLS when the endpoint asks for it.
std::unique_ptr<Transport> connect(const Endpoint& endpoint);

std::unique_ptr<Transport> connect_tcp(const std::string& host, std::uint16_t port,
                                       std::chrono::milliseconds timeout);

/// Performs a client TLS handshake over an established stream, verifying the peer against `host`.
std::unique_ptr<Transport> wrap_tls(std::unique_ptr<Transport> inner, const std::string& host);

bool is_loopback_host(std::string_view host);

/**
Buffered reader on top of a Transport. Lines may end in CRLF or a bare LF;
the terminator is stripped.
**/
class StreamReader
{
public:
    explicit StreamReader(Transport& transport) : transport_(transport) {}

    /// Throws transport_error when the stream ends before a line terminator.
    std::string read_line(std::size_t max_length = 1 << 20);
    std::string read_exact(std::size_t count);

    /// Next octet, or -1 at end of stream.
    int get();
    int peek();

private:
    bool fill();

    Transport& transport_;
    std::string buffer_;
    std::size_t pos_ = 0;
};

/// In-memory transport: reads come from a fixed script, writes are captured.
class StringTransport : public Transport
{
public:
    explicit StringTransport(std::string input = {}) : input_(std::move(input)) {}

    std::size_t read_some(std::span<char> buffer) override;
    void write_all(std::string_view data) override { output_.append(data); }

    const std::string& output() const { return output_; }

private:
    std::string input_;
    std::size_t pos_ = 0;
    std::string output_;
};

} // namespace mailbridge::net
