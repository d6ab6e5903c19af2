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
#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <openssl/err.h>
#include <openssl/ssl.h>
#include <openssl/x509v3.h>

#include <cerrno>
#include <cstring>

#include "mailbridge/error.hpp"
#include "mailbridge/net/transport.hpp"

namespace mailbridge::net
{

namespace
{

std::string errno_text(int err)
{
    return std::strerror(err);
}

class SocketTransport : public Transport
{
public:
    explicit SocketTransport(int fd) : fd_(fd) {}
    ~SocketTransport() override { ::close(fd_); }

    SocketTransport(const SocketTransport&) = delete;
    SocketTransport& operator=(const SocketTransport&) = delete;

    int fd() const { return fd_; }

    std::size_t read_some(std::span<char> buffer) override
    {
        while (true)
        {
            const ssize_t n = ::recv(fd_, buffer.data(), buffer.size(), 0);
            if (n >= 0)
                return static_cast<std::size_t>(n);
            if (errno == EINTR)
                continue;
            if (errno == EAGAIN || errno == EWOULDBLOCK)
                throw Error(ErrorKind::transport_error, "read timed out");
            throw Error(ErrorKind::transport_error, "read failed: " + errno_text(errno));
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
                throw Error(ErrorKind::transport_error, "write failed: " + errno_text(errno));
            }
            data.remove_prefix(static_cast<std::size_t>(n));
        }
    }

    void shutdown_write() override { ::shutdown(fd_, SHUT_WR); }

private:
    int fd_;
};

struct SslCtxDeleter
{
    void operator()(SSL_CTX* ctx) const { SSL_CTX_free(ctx); }
};

struct SslDeleter
{
    void operator()(SSL* ssl) const { SSL_free(ssl); }
};

std::string ssl_error_text()
{
    const unsigned long code = ERR_get_error();
    if (code == 0)
        return "unknown TLS error";
    char buf[256];
    ERR_error_string_n(code, buf, sizeof(buf));
    return buf;
}

class TlsTransport : public Transport
{
public:
    TlsTransport(std::unique_ptr<SocketTransport> socket, const std::string& host) : socket_(std::move(socket))
    {
        ctx_.reset(SSL_CTX_new(TLS_client_method()));
        if (!ctx_)
            throw Error(ErrorKind::transport_error, "TLS context: " + ssl_error_text());
        SSL_CTX_set_min_proto_version(ctx_.get(), TLS1_2_VERSION);
        SSL_CTX_set_verify(ctx_.get(), SSL_VERIFY_PEER, nullptr);
        SSL_CTX_set_default_verify_paths(ctx_.get());

        ssl_.reset(SSL_new(ctx_.get()));
        if (!ssl_)
            throw Error(ErrorKind::transport_error, "TLS session: " + ssl_error_text());
        SSL_set_tlsext_host_name(ssl_.get(), host.c_str());
        SSL_set1_host(ssl_.get(), host.c_str());
        SSL_set_fd(ssl_.get(), socket_->fd());
        if (SSL_connect(ssl_.get()) != 1)
            throw Error(ErrorKind::transport_error, "TLS handshake with " + host + " failed: " + ssl_error_text());
    }

    ~TlsTransport() override
    {
        if (ssl_)
            SSL_shutdown(ssl_.get());
    }

    std::size_t read_some(std::span<char> buffer) override
    {
        const int n = SSL_read(ssl_.get(), buffer.data(), static_cast<int>(buffer.size()));
        if (n > 0)
            return static_cast<std::size_t>(n);
        const int err = SSL_get_error(ssl_.get(), n);
        if (err == SSL_ERROR_ZERO_RETURN)
            return 0;
        throw Error(ErrorKind::transport_error, "TLS read failed: " + ssl_error_text());
    }

    void write_all(std::string_view data) override
    {
        while (!data.empty())
        {
            const int n = SSL_write(ssl_.get(), data.data(), static_cast<int>(data.size()));
            if (n <= 0)
                throw Error(ErrorKind::transport_error, "TLS write failed: " + ssl_error_text());
            data.remove_prefix(static_cast<std::size_t>(n));
        }
    }

private:
    std::unique_ptr<SocketTransport> socket_;
    std::unique_ptr<SSL_CTX, SslCtxDeleter> ctx_;
    std::unique_ptr<SSL, SslDeleter> ssl_;
};

int connect_with_timeout(const addrinfo* ai, std::chrono::milliseconds timeout, std::string& failure)
{
    const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd < 0)
    {
        failure = errno_text(errno);
        return -1;
    }
    const int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);

    int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
    if (rc < 0 && errno == EINPROGRESS)
    {
        pollfd pfd{fd, POLLOUT, 0};
        rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
        if (rc == 0)
        {
            failure = "connect timed out";
            ::close(fd);
            return -1;
        }
        int err = 0;
        socklen_t len = sizeof(err);
        ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
        if (rc < 0 || err != 0)
        {
            failure = errno_text(rc < 0 ? errno : err);
            ::close(fd);
            return -1;
        }
    }
    else if (rc < 0)
    {
        failure = errno_text(errno);
        ::close(fd);
        return -1;
    }

    ::fcntl(fd, F_SETFL, flags);
    timeval tv{};
    tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
    tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
    ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
    ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    return fd;
}

std::unique_ptr<SocketTransport> open_socket(const std::string& host, std::uint16_t port,
                                             std::chrono::milliseconds timeout)
{
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* result = nullptr;
    const std::string service = std::to_string(port);
    const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &result);
    if (rc != 0)
        throw Error(ErrorKind::transport_error, "cannot resolve " + host + ": " + ::gai_strerror(rc));

    std::string failure = "no addresses";
    int fd = -1;
    for (const addrinfo* ai = result; ai && fd < 0; ai = ai->ai_next)
        fd = connect_with_timeout(ai, timeout, failure);
    ::freeaddrinfo(result);
    if (fd < 0)
        throw Error(ErrorKind::transport_error, "cannot connect to " + host + ":" + service + ": " + failure);
    return std::make_unique<SocketTransport>(fd);
}

} // namespace

std::unique_ptr<Transport> connect_tcp(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout)
{
    return open_socket(host, port, timeout);
}

std::unique_ptr<Transport> wrap_tls(std::unique_ptr<Transport> inner, const std::string& host)
{
    auto* raw = dynamic_cast<SocketTransport*>(inner.get());
    if (!raw)
        throw Error(ErrorKind::precondition, "TLS requires a socket transport");
    inner.release();
    return std::make_unique<TlsTransport>(std::unique_ptr<SocketTransport>(raw), host);
}

std::unique_ptr<Transport> connect(const Endpoint& endpoint)
{
    auto socket = connect_tcp(endpoint.host, endpoint.port, endpoint.timeout);
    if (endpoint.tls == TlsMode::implicit)
        return wrap_tls(std::move(socket), endpoint.host);
    return socket;
}

bool is_loopback_host(std::string_view host)
{
    if (host == "localhost" || host == "::1" || host == "[::1]")
        return true;
    in_addr addr{};
    const std::string h(host);
    if (::inet_pton(AF_INET, h.c_str(), &addr) == 1)
        return (ntohl(addr.s_addr) >> 24) == 127;
    return false;
}

} // namespace mailbridge::net
