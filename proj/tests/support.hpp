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

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include "mailbridge/config.hpp"
#include "mailbridge/log.hpp"
#include "mailbridge/testkit/mock_mail.hpp"
#include "mailbridge/testkit/mock_xmpp.hpp"

namespace mailbridge::test
{

/// base64 through OpenSSL, kept apart from the codec under test.
inline std::string openssl_base64(std::string_view octets)
{
    std::string out(4 * ((octets.size() + 2) / 3) + 1, '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                  reinterpret_cast<const unsigned char*>(octets.data()), static_cast<int>(octets.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir
{
public:
    TempDir()
    {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("mailbridge-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
}

/// Captures log lines for the lifetime of the object.
class LogCapture
{
public:
    LogCapture()
        : guard_([this](log::Level, std::string_view line) {
              text_.append(line);
              text_.push_back('\n');
          })
    {
    }
    const std::string& text() const { return text_; }

private:
    std::string text_;
    log::ScopedSink guard_;
};

/// Config pointing at the given mocks: one mail account named "shared".
inline config::Config make_config(config::Mode mode, const testkit::MockXmppServer& xmpp,
                                  const testkit::MockMailServer* mail, const std::filesystem::path& state_path)
{
    config::Config cfg;
    cfg.mode = mode;
    cfg.xmpp = xmpp.account();
    cfg.state_path = state_path;
    if (mail)
    {
        config::AccountConfig account;
        account.name = "shared";
        account.mail = mail->account();
        cfg.accounts.push_back(std::move(account));
    }
    return cfg;
}

} // namespace mailbridge::test
