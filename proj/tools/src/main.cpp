#include <spdlog/spdlog.h>

#include <iostream>

#include "common.hpp"
#include "mhagent/domain/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"mhagent: counseling agent with periodic mental-state assessment, data pipeline and benchmark"};
    app.require_subcommand(1);
    std::string log_level = "warn";
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
    app.parse_complete_callback([&] { spdlog::set_level(spdlog::level::from_str(log_level)); });

    mhagent::cli::register_chat(app);
    mhagent::cli::register_serve(app);
    mhagent::cli::register_data(app);
    mhagent::cli::register_eval(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const mhagent::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
