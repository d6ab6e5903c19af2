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

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <thread>
#include <vector>

#include "mailbridge/net/transport.hpp"

namespace mailbridge::testkit
{

/// Fault injection shared by the mock servers.
struct FaultPlan
{
    /// Drop the connection once this many octets have been sent.
    std::optional<std::size_t> close_after_octets;
    /// Drop the connection right after the greeting or stream header.
    bool close_after_banner = false;
    /// Replace the response to the K-th command (1-based; 0 is the greeting) with a malformed line.
    std::optional<std::size_t> malformed_at_step;
    /// Accept and immediately close every connection.
    bool close_immediately = false;
};

/**
Loopback TCP acceptor on an ephemeral port. Each connection is served on its
own thread by the handler.
**/
class Listener
{
public:
    using Handler = std::function<void(net::Transport&)>;

    explicit Listener(Handler handler);
    ~Listener();

    Listener(const Listener&) = delete;
    Listener& operator=(const Listener&) = delete;

    std::uint16_t port() const { return port_; }
    net::Endpoint endpoint() const { return {"127.0.0.1", port_, net::TlsMode::none, std::chrono::seconds(10)}; }

    /// Closes the listening socket and every open connection. Later connects are refused.
    void stop();

    /// Waits until no connection is being served.
    bool wait_idle(std::chrono::milliseconds timeout = std::chrono::seconds(5));

    std::size_t accepted() const { return accepted_; }

private:
    void accept_loop();
    void serve(int fd);

    Handler handler_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::atomic<std::size_t> accepted_{0};
    std::thread acceptor_;

    std::mutex mutex_;
    std::condition_variable idle_;
    std::set<int> active_;
    std::vector<std::thread> workers_;
};

/// Transport over a server-side socket that stops writing once a byte budget is spent.
class ServerTransport : public net::Transport
{
public:
    ServerTransport(net::Transport& inner, std::optional<std::size_t> write_budget)
        : inner_(inner), budget_(write_budget)
    {
    }

    std::size_t read_some(std::span<char> buffer) override { return inner_.read_some(buffer); }
    void write_all(std::string_view data) override;

private:
    net::Transport& inner_;
    std::optional<std::size_t> budget_;
};

/// Thrown inside a mock handler to drop the connection.
struct DropConnection
{
};

/// A loopback endpoint with nothing listening: connecting is refused.
net::Endpoint refused_endpoint();

/// Transport that also keeps a copy of every octet read.
class RecordingTransport : public net::Transport
{
public:
    RecordingTransport(net::Transport& inner, std::function<void(std::string_view)> on_read)
        : inner_(inner), on_read_(std::move(on_read))
    {
    }

    std::size_t read_some(std::span<char> buffer) override
    {
        const std::size_t n = inner_.read_some(buffer);
        if (n > 0)
            on_read_(std::string_view(buffer.data(), n));
        return n;
    }
    void write_all(std::string_view data) override { inner_.write_all(data); }

private:
    net::Transport& inner_;
    std::function<void(std::string_view)> on_read_;
};

} // namespace mailbridge::testkit
