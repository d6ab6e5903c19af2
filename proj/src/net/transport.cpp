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
#include "mailbridge/net/transport.hpp"

#include <algorithm>
#include <array>

#include "mailbridge/error.hpp"

namespace mailbridge::net
{

bool StreamReader::fill()
{
    if (pos_ > 0 && pos_ == buffer_.size())
    {
        buffer_.clear();
        pos_ = 0;
    }
    std::array<char, 16384> chunk;
    const std::size_t n = transport_.read_some(chunk);
    if (n == 0)
        return false;
    buffer_.append(chunk.data(), n);
    return true;
}

std::string StreamReader::read_line(std::size_t max_length)
{
    // relative to pos_, which fill() may move when it compacts the buffer
    std::size_t scanned = 0;
    while (true)
    {
        const auto nl = buffer_.find('\n', pos_ + scanned);
        if (nl != std::string::npos)
        {
            std::size_t end = nl;
            if (end > pos_ && buffer_[end - 1] == '\r')
                --end;
            std::string line = buffer_.substr(pos_, end - pos_);
            pos_ = nl + 1;
            return line;
        }
        scanned = buffer_.size() - pos_;
        if (scanned > max_length)
            throw Error(ErrorKind::protocol_error,
                        "line exceeds " + std::to_string(max_length) + " octets");
        if (!fill())
            throw Error(ErrorKind::transport_error, "connection closed by peer");
    }
}

std::string StreamReader::read_exact(std::size_t count)
{
    std::string out;
    out.reserve(count);
    while (out.size() < count)
    {
        if (pos_ == buffer_.size() && !fill())
            throw Error(ErrorKind::transport_error, "connection closed by peer");
        const std::size_t take = std::min(count - out.size(), buffer_.size() - pos_);
        out.append(buffer_, pos_, take);
        pos_ += take;
    }
    return out;
}

int StreamReader::get()
{
    const int c = peek();
    if (c >= 0)
        ++pos_;
    return c;
}

int StreamReader::peek()
{
    if (pos_ == buffer_.size() && !fill())
        return -1;
    return static_cast<unsigned char>(buffer_[pos_]);
}

std::size_t StringTransport::read_some(std::span<char> buffer)
{
    const std::size_t n = std::min(buffer.size(), input_.size() - pos_);
    std::copy_n(input_.data() + pos_, n, buffer.data());
    pos_ += n;
    return n;
}

} // namespace mailbridge::net
