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
#include "mailbridge/cli.hpp"

#include <atomic>
#include <csignal>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"
#include "mailbridge/config.hpp"
#include "mailbridge/daemon/daemon.hpp"
#include "mailbridge/log.hpp"
#include "mailbridge/pipe.hpp"

namespace mailbridge::cli
{

namespace
{

std::atomic<bool> stop_requested{false};

extern "C" void handle_stop_signal(int)
{
    stop_requested = true;
}

class SignalGuard
{
public:
    SignalGuard()
    {
        stop_requested = false;
        struct sigaction action{};
        action.sa_handler = handle_stop_signal;
        sigemptyset(&action.sa_mask);
        sigaction(SIGINT, &action, &previous_int_);
        sigaction(SIGTERM, &action, &previous_term_);
    }

    ~SignalGuard()
    {
        sigaction(SIGINT, &previous_int_, nullptr);
        sigaction(SIGTERM, &previous_term_, nullptr);
    }

private:
    struct sigaction previous_int_{};
    struct sigaction previous_term_{};
};

} // namespace

int main(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err)
{
    log::ScopedSink sink(err);

    CLI::App app{"Forward mailbox messages to XMPP users", "mailbridge"};
    std::string config_path;
    std::string mode_text;
    bool once = false;
    int interval = 0;
    std::string state_path;
    std::string rcpt;
    bool dry_run = false;
    bool verbose = false;

    app.add_option("--config", config_path, "Configuration file")->required();
    app.add_option("--mode", mode_text, "type1, type2 or pipe (overrides the config file)")
        ->check(CLI::IsMember({"type1", "type2", "pipe"}));
    auto* once_flag = app.add_flag("--once", once, "Run a single polling pass (default)");
    auto* interval_option = app.add_option("--interval", interval, "Poll every SECONDS until interrupted");
    once_flag->excludes(interval_option);
    app.add_option("--state", state_path, "State file (overrides state_path)");
    app.add_option("--rcpt", rcpt, "Recipient JID for pipe mode");
    app.add_flag("--dry-run", dry_run, "Route and report without sending, recording or deleting");
    app.add_flag("--verbose", verbose, "Debug logging");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e, out, err);
    }
    catch (const CLI::ParseError& e)
    {
        err << "error " << e.what() << '\n' << app.help();
        return daemon::exit_code::config;
    }

    log::set_threshold(verbose ? log::Level::debug : log::Level::info);

    config::Config config;
    try
    {
        std::optional<config::Mode> mode_override;
        if (!mode_text.empty())
            mode_override = config::mode_from_string(mode_text);
        config = config::load_config(config_path, mode_override);
        if (!state_path.empty())
            config.state_path = state_path;
    }
    catch (const Error& e)
    {
        log::error("config", e.what());
        return daemon::exit_code::config;
    }

    if (config.mode == config::Mode::pipe)
    {
        const std::string input{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
        pipe::PipeOptions options;
        if (app.count("--rcpt") > 0)
            options.rcpt = rcpt;
        options.dry_run = dry_run;
        options.decisions = &out;
        return pipe::run_pipe(input, config, options);
    }

    if (app.count("--rcpt") > 0)
        log::warning("cli", "--rcpt only applies to pipe mode");

    daemon::RunOptions options;
    options.dry_run = dry_run;
    options.decisions = &out;
    try
    {
        if (app.count("--interval") > 0)
        {
            SignalGuard signals;
            daemon::LoopControl control;
            control.stop = &stop_requested;
            control.on_report = [&](const daemon::RunReport& report) {
                if (!dry_run)
                    out << report.summary() << std::endl;
            };
            return daemon::run_loop(config, std::chrono::seconds(interval), options, std::move(control));
        }

        const daemon::RunReport report = daemon::run_once(config, options);
        if (!dry_run)
            out << report.summary() << '\n';
        return report.exit_status();
    }
    catch (const Error& e)
    {
        log::error("cli", e.what());
        return daemon::exit_code::config;
    }
}

int main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv;
    argv.push_back("mailbridge");
    for (const auto& a : args)
        argv.push_back(a.c_str());
    return main(static_cast<int>(argv.size()), argv.data(), in, out, err);
}

} // namespace mailbridge::cli
