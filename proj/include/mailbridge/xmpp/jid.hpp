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

#include <string>
#include <string_view>

namespace mailbridge::xmpp
{

/// XMPP address. Localpart and domain are stored ASCII-lowercased; the resource keeps its case.
class Jid
{
public:
    Jid() = default;

    const std::string& localpart() const { return localpart_; }
    const std::string& domain() const { return domain_; }
    const std::string& resource() const { return resource_; }

    bool empty() const { return domain_.empty(); }
    Jid bare() const;
    Jid with_resource(std::string resource) const;

    /// local@domain/resource, omitting absent parts.
    std::string str() const;

    friend bool operator==(const Jid&, const Jid&) = default;
    friend auto operator<=>(const Jid&, const Jid&) = default;

private:
    friend Jid parse_jid(std::string_view input);

    std::string localpart_;
    std::string domain_;
    std::string resource_;
};

/// Throws Error(invalid_jid) naming the offending rule.
Jid parse_jid(std::string_view input);

} // namespace mailbridge::xmpp
