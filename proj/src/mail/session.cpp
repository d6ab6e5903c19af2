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
#include "mailbridge/mail/session.hpp"

#include "mailbridge/log.hpp"

namespace mailbridge::mail
{

MailSession::MailSession(std::unique_ptr<net::Transport> transport, const MailAccount& account,
                         SessionOptions options)
    : transport_(std::move(transport)), reader_(*transport_), account_(account), options_(options)
{
}

void MailSession::send_line(const std::string& line, bool sensitive)
{
    log::debug("mail", "> " + (sensitive ? line.substr(0, line.find(' ')) + " " + std::string(redacted) : line));
    transport_->write_all(line + "\r\n");
}

void MailSession::require_listed(const std::string& uid) const
{
    if (!listed_.contains(uid))
        throw Error(ErrorKind::unknown_uid, "uid '" + uid + "' was not listed in this session");
}

void MailSession::require_delete_enabled() const
{
    if (!options_.delete_after_forward)
        throw Error(ErrorKind::config_error, "deleting messages requires delete_after_forward = true");
}

std::unique_ptr<MailSession> open_session(const MailAccount& account, std::unique_ptr<net::Transport> transport,
                                          SessionOptions options)
{
    if (account.protocol == Protocol::pop3)
        return std::make_unique<Pop3Session>(std::move(transport), account, options);
    return std::make_unique<ImapSession>(std::move(transport), account, options);
}

} // namespace mailbridge::mail
