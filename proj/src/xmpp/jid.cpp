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
#include "mailbridge/xmpp/jid.hpp"

#include "mailbridge/codec.hpp"
#include "mailbridge/error.hpp"

namespace mailbridge::xmpp
{

namespace
{

[[noreturn]] void reject(std::string_view input, const std::string& reason)
{
    throw Error(ErrorKind::invalid_jid, "invalid JID '" + codec::utf8_sanitize(input) + "': " + reason);
}

void check_part(std::string_view input, std::string_view part, std::string_view what)
{
    for (char c : part)
    {
        const auto u = static_cast<unsigned char>(c);
        if (codec::is_space(c) || u < 0x20 || u == 0x7F)
            reject(input, std::string(what) + " contains whitespace or control characters");
        if (c == '@' || c == '/')
            reject(input, std::string(what) + " contains '" + c + "'");
    }
    if (part.size() > 1023)
        reject(input, std::string(what) + " is longer than 1023 octets");
}

} // namespace

Jid Jid::bare() const
{
    Jid copy = *this;
    copy.resource_.clear();
    return copy;
}

Jid Jid::with_resource(std::string resource) const
{
    return parse_jid(bare().str() + (resource.empty() ? "" : "/" + resource));
}

std::string Jid::str() const
{
    std::string out;
    if (!localpart_.empty())
        out.append(localpart_).append("@");
    out.append(domain_);
    if (!resource_.empty())
        out.append("/").append(resource_);
    return out;
}

Jid parse_jid(std::string_view input)
{
    if (!codec::is_valid_utf8(input))
        reject(input, "not valid UTF-8");

    std::string_view rest = input;
    std::string_view local;
    const auto at = rest.find('@');
    const auto first_slash = rest.find('/');
    if (at != std::string_view::npos && (first_slash == std::string_view::npos || at < first_slash))
    {
        local = rest.substr(0, at);
        if (local.empty())
            reject(input, "empty localpart");
        rest = rest.substr(at + 1);
    }

    std::string_view domain = rest;
    std::string_view resource;
    bool has_resource = false;
    if (const auto slash = rest.find('/'); slash != std::string_view::npos)
    {
        domain = rest.substr(0, slash);
        resource = rest.substr(slash + 1);
        has_resource = true;
    }
    if (domain.empty())
        reject(input, "empty domain");
    if (has_resource && resource.empty())
        reject(input, "empty resource after '/'");

    check_part(input, local, "localpart");
    check_part(input, domain, "domain");
    check_part(input, resource, "resource");

    Jid jid;
    jid.localpart_ = codec::ascii_lower(local);
    jid.domain_ = codec::ascii_lower(domain);
    jid.resource_ = std::string(resource);
    return jid;
}

} // namespace mailbridge::xmpp
