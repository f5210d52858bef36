#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <thread>

#include "exit_codes.hpp"
#include "geosocial/api/service.hpp"

using namespace geosocial;

int main(int argc, char** argv) {
    CLI::App app{"geosocial HTTP API server"};
    std::string config_path, bind, db, places;
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--bind", bind, "host:port to listen on (port 0 picks one)");
    app.add_option("--db", db, "SQLite database path");
    app.add_option("--places", places, "city dataset CSV");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? tools::kExitOk : tools::kExitValidation;
    }

    api::ServiceConfig config;
    if (!config_path.empty()) {
        auto c = api::load_config_file(config_path);
        if (!c) {
            std::cerr << "config: " << c.error().message << '\n';
            return tools::kExitValidation;
        }
        config = std::move(*c);
    }
    auto env = api::apply_environment(config, api::process_env);
    if (!env) {
        std::cerr << "environment: " << env.error().message << '\n';
        return tools::kExitValidation;
    }
    config = std::move(*env);
    if (!bind.empty()) config.bind_address = bind;
    if (!db.empty()) config.db_path = db;
    if (!places.empty()) config.places_dataset_path = places;

    // Block termination signals before any worker thread exists so they
    // all inherit the mask; the main thread then waits for one.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    auto handle = api::serve(config);
    if (!handle) {
        std::cerr << "startup failed: " << to_string(handle.error().code) << ": "
                  << handle.error().message << '\n';
        const auto code = handle.error().code;
        return code == ErrorCode::config || code == ErrorCode::invalid_argument
                   ? tools::kExitValidation
                   : tools::kExitRuntime;
    }
    std::cout << "listening on " << (*handle)->url() << std::endl;

    int sig = 0;
    sigwait(&signals, &sig);
    std::cout << "shutting down" << std::endl;
    (*handle)->stop();
    (*handle)->wait();
    return tools::kExitOk;
}
