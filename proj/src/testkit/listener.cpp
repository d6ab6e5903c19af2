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
#include "mailbridge/testkit/listener.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>

#include <cstring>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <stdexcept>

#include "mailbridge/error.hpp"

namespace mailbridge::testkit
{

namespace
{

class FdTransport : public net::Transport
{
public:
    explicit FdTransport(int fd) : fd_(fd) {}

    std::size_t read_some(std::span<char> buffer) override
    {
        while (true)
        {
            const ssize_t n = ::recv(fd_, buffer.data(), buffer.size(), 0);
            if (n >= 0)
                return static_cast<std::size_t>(n);
            if (errno != EINTR)
                throw Error(ErrorKind::transport_error, "mock read failed: " + std::string(std::strerror(errno)));
        }
    }

    void write_all(std::string_view data) override
    {
        while (!data.empty())
        {
            const ssize_t n = ::send(fd_, data.data(), data.size(), MSG_NOSIGNAL);
            if (n < 0)
            {
                if (errno == EINTR)
                    continue;
                throw Error(ErrorKind::transport_error, "mock write failed");
            }
            data.remove_prefix(static_cast<std::size_t>(n));
        }
    }

private:
    int fd_;
};

std::pair<int, std::uint16_t> bind_loopback()
{
    const int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd < 0)
        throw std::runtime_error("mock: socket() failed");
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
    {
        ::close(fd);
        throw std::runtime_error("mock: bind() failed");
    }
    socklen_t len = sizeof(addr);
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    return {fd, ntohs(addr.sin_port)};
}

} // namespace

Listener::Listener(Handler handler) : handler_(std::move(handler))
{
    std::tie(listen_fd_, port_) = bind_loopback();
    if (::listen(listen_fd_, 16) != 0)
    {
        ::close(listen_fd_);
        throw std::runtime_error("mock: listen() failed");
    }
    acceptor_ = std::thread([this] { accept_loop(); });
}

Listener::~Listener()
{
    stop();
}

void Listener::accept_loop()
{
    while (!stopping_)
    {
        pollfd pfd{listen_fd_, POLLIN, 0};
        if (::poll(&pfd, 1, 50) <= 0)
            continue;
        const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
        if (fd < 0)
            continue;
        timeval tv{10, 0};
        ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
        ++accepted_;
        std::lock_guard lock(mutex_);
        if (stopping_)
        {
            ::close(fd);
            break;
        }
        active_.insert(fd);
        workers_.emplace_back([this, fd] { serve(fd); });
    }
}

void Listener::serve(int fd)
{
    try
    {
        FdTransport transport(fd);
        handler_(transport);
    }
    catch (...)
    {
        // mocks drop the connection on any failure
    }
    std::lock_guard lock(mutex_);
    active_.erase(fd);
    ::shutdown(fd, SHUT_RDWR);
    ::close(fd);
    idle_.notify_all();
}

void Listener::stop()
{
    if (stopping_.exchange(true))
        return;
    if (acceptor_.joinable())
        acceptor_.join();
    ::close(listen_fd_);

    std::vector<std::thread> workers;
    {
        std::lock_guard lock(mutex_);
        for (int fd : active_)
            ::shutdown(fd, SHUT_RDWR);
        workers.swap(workers_);
    }
    for (auto& t : workers)
        t.join();
}

bool Listener::wait_idle(std::chrono::milliseconds timeout)
{
    std::unique_lock lock(mutex_);
    return idle_.wait_for(lock, timeout, [this] { return active_.empty(); });
}

void ServerTransport::write_all(std::string_view data)
{
    if (!budget_)
    {
        inner_.write_all(data);
        return;
    }
    if (data.size() <= *budget_)
    {
        *budget_ -= data.size();
        inner_.write_all(data);
        return;
    }
    inner_.write_all(data.substr(0, *budget_));
    *budget_ = 0;
    throw DropConnection{};
}

net::Endpoint refused_endpoint()
{
    const auto [fd, port] = bind_loopback();
    ::close(fd);
    return {"127.0.0.1", port, net::TlsMode::none, std::chrono::seconds(5)};
}

} // namespace mailbridge::testkit
