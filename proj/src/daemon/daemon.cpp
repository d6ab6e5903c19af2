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
#include "mailbridge/daemon/daemon.hpp"

#include <thread>

#include "mailbridge/log.hpp"
#include "mailbridge/mail/session.hpp"
#include "mailbridge/router.hpp"
#include "mailbridge/xmpp/client.hpp"

namespace mailbridge::daemon
{

namespace
{

constexpr std::string_view component = "daemon";

Disposition disposition_of(const router::RouteDecision& decision)
{
    switch (decision.kind)
    {
    case router::RouteDecision::Kind::deliver: return Disposition::forwarded;
    case router::RouteDecision::Kind::skip: return Disposition::skipped;
    case router::RouteDecision::Kind::reject: return Disposition::rejected;
    }
    return Disposition::skipped;
}

class AccountRun
{
public:
    AccountRun(const config::Config& config, const config::AccountConfig& account, const RunOptions& options,
               StateSet& states, xmpp::XmppClient* xmpp, RunReport& report)
        : config_(config), account_(account), options_(options), states_(states), xmpp_(xmpp), report_(report)
    {
    }

    void run()
    {
        std::unique_ptr<mail::MailSession> session;
        std::vector<mail::ListEntry> listing;
        try
        {
            session = mail::open_session(account_.mail, options_.connector(account_.mail.endpoint()),
                                         {config_.delete_after_forward});
            listing = session->list();
        }
        catch (const Error& e)
        {
            log::error(component, "account " + account_.name + ": " + e.what());
            report_.account_errors.emplace_back(account_.name, e.what());
            return;
        }

        std::vector<std::string> uids;
        uids.reserve(listing.size());
        for (const auto& entry : listing)
            uids.push_back(entry.uid);
        report_.listed += uids.size();

        MailboxState& state = states_[account_.name];
        state.account_id = account_.name;
        const std::size_t before = state.processed.size();
        const std::vector<std::string> fresh = detect_new(state, uids);
        report_.fresh += fresh.size();
        if (state.processed.size() != before)
            persist();
        log::info(component, "account " + account_.name + ": " + std::to_string(uids.size()) + " listed, " +
                                 std::to_string(fresh.size()) + " new");

        bool session_lost = false;
        for (const auto& uid : fresh)
        {
            if (session_lost)
            {
                report_.errors.emplace_back(uid, "mail session lost");
                continue;
            }
            try
            {
                process(*session, state, uid);
            }
            catch (const Error& e)
            {
                log::warning(component, "account " + account_.name + " uid " + uid + ": " + e.what());
                report_.errors.emplace_back(uid, e.what());
                session_lost = e.kind() == ErrorKind::transport_error;
            }
        }

        if (!session_lost)
        {
            try
            {
                session->close();
            }
            catch (const Error& e)
            {
                log::warning(component, "account " + account_.name + ": closing session: " + e.what());
            }
        }
    }

private:
    void persist()
    {
        if (!options_.dry_run)
            save_state(config_.state_path, states_);
    }

    void process(mail::MailSession& session, MailboxState& state, const std::string& uid)
    {
        const mail::EmailMessage msg = mail::parse_message(session.fetch(uid));
        const xmpp::Jid default_recipient = account_.default_recipient.value_or(xmpp::Jid{});
        const auto mode = config_.mode == config::Mode::type2 ? router::CheckerMode::type2 : router::CheckerMode::type1;
        const router::RouteDecision decision =
            router::route(mode, msg, default_recipient, config_.whitelist, config_.max_body_chars);

        if (options_.dry_run)
        {
            if (options_.decisions)
                *options_.decisions << router::describe(decision) << '\n';
            count(decision.kind);
            return;
        }

        const bool deliver = decision.kind == router::RouteDecision::Kind::deliver;
        if (deliver)
        {
            if (!xmpp_)
                throw Error(ErrorKind::transport_error, "no XMPP session");
            send(xmpp::build_message_stanza(decision.recipient, decision.body, config_.message_type));
            log::info(component, "forwarded " + account_.name + "/" + uid + " to " + decision.recipient.str());
            phase(Phase::after_forward, uid);
        }
        else
        {
            log::debug(component, account_.name + "/" + uid + ": " + router::describe(decision));
        }

        state.record(uid, disposition_of(decision));
        persist();
        count(decision.kind);

        if (deliver)
        {
            phase(Phase::after_state_write, uid);
            if (config_.delete_after_forward)
            {
                try
                {
                    session.remove(uid);
                }
                catch (const Error& e)
                {
                    log::warning(component, "could not delete " + account_.name + "/" + uid + ": " + e.what());
                }
            }
        }
    }

    void send(const xmpp::Stanza& stanza)
    {
        try
        {
            xmpp_->send(stanza);
        }
        catch (const Error& e)
        {
            // a failed write leaves the stream unusable; keep the mail session going
            throw Error(ErrorKind::stream_error, std::string("XMPP delivery failed: ") + e.what());
        }
    }

    void phase(Phase p, const std::string& uid)
    {
        if (options_.on_phase)
            options_.on_phase(p, account_.name, uid);
    }

    void count(router::RouteDecision::Kind kind)
    {
        switch (kind)
        {
        case router::RouteDecision::Kind::deliver: ++report_.forwarded; break;
        case router::RouteDecision::Kind::skip: ++report_.skipped; break;
        case router::RouteDecision::Kind::reject: ++report_.rejected; break;
        }
    }

    const config::Config& config_;
    const config::AccountConfig& account_;
    const RunOptions& options_;
    StateSet& states_;
    xmpp::XmppClient* xmpp_;
    RunReport& report_;
};

} // namespace

int RunReport::exit_status() const
{
    if (!xmpp_error.empty())
        return exit_code::xmpp_transport;
    if (!account_errors.empty() && forwarded == 0)
        return exit_code::mail_transport;
    return exit_code::ok;
}

std::string RunReport::summary() const
{
    return "listed=" + std::to_string(listed) + " new=" + std::to_string(fresh) +
           " forwarded=" + std::to_string(forwarded) + " skipped=" + std::to_string(skipped) +
           " rejected=" + std::to_string(rejected) + " errors=" + std::to_string(errors.size());
}

RunReport& RunReport::operator+=(const RunReport& other)
{
    listed += other.listed;
    fresh += other.fresh;
    forwarded += other.forwarded;
    skipped += other.skipped;
    rejected += other.rejected;
    errors.insert(errors.end(), other.errors.begin(), other.errors.end());
    account_errors.insert(account_errors.end(), other.account_errors.begin(), other.account_errors.end());
    if (xmpp_error.empty())
        xmpp_error = other.xmpp_error;
    return *this;
}

RunReport run_once(const config::Config& config, const RunOptions& options)
{
    RunReport report;
    if (config.mode == config::Mode::pipe)
        throw ConfigError("general", "mode", "run_once needs a checker mode (type1 or type2)");
    if (config.state_path.empty() && !options.dry_run)
        throw ConfigError("general", "state_path", "missing required value (set it here or pass --state)");

    std::unique_ptr<xmpp::XmppClient> xmpp;
    if (!options.dry_run)
    {
        try
        {
            xmpp = xmpp::connect_client(config.xmpp, options.connector);
        }
        catch (const Error& e)
        {
            if (e.kind() == ErrorKind::config_error)
                throw;
            log::error(component, std::string("XMPP: ") + e.what());
            report.xmpp_error = e.what();
            return report;
        }
    }

    StateSet states = load_state(config.state_path.empty() ? std::filesystem::path{} : config.state_path);
    for (const auto& account : config.accounts)
        AccountRun(config, account, options, states, xmpp.get(), report).run();

    if (xmpp)
        xmpp->close();
    log::info(component, report.summary());
    return report;
}

int run_loop(const config::Config& config, std::chrono::seconds interval, const RunOptions& options,
             LoopControl control)
{
    if (interval.count() < 1)
        throw ConfigError("general", "interval", "must be at least 1 second");

    const auto stopped = [&] { return control.stop && control.stop->load(); };
    if (!control.sleep)
    {
        control.sleep = [&](std::chrono::seconds duration) {
            const auto deadline = std::chrono::steady_clock::now() + duration;
            while (std::chrono::steady_clock::now() < deadline)
            {
                if (stopped())
                    return false;
                std::this_thread::sleep_for(std::chrono::milliseconds(50));
            }
            return !stopped();
        };
    }

    while (!stopped())
    {
        try
        {
            const RunReport report = run_once(config, options);
            if (control.on_report)
                control.on_report(report);
        }
        catch (const ConfigError&)
        {
            throw;
        }
        catch (const Error& e)
        {
            if (e.kind() == ErrorKind::config_error)
                throw;
            log::error(component, std::string("run failed: ") + e.what());
        }
        if (stopped() || !control.sleep(interval))
            break;
    }
    log::info(component, "stopping");
    return exit_code::ok;
}

} // namespace mailbridge::daemon
