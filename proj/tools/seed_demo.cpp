#include <CLI11.hpp>

#include <iostream>

#include "exit_codes.hpp"
#include "geosocial/sim/demo.hpp"

using namespace geosocial;

int main(int argc, char** argv) {
    CLI::App app{"Populate a running server with demo users"};
    std::string url;
    app.add_option("--url", url, "server base URL, e.g. http://127.0.0.1:8080")->required();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? tools::kExitOk : tools::kExitValidation;
    }

    auto summary = sim::seed_demo(url);
    if (!summary) {
        std::cerr << "seed-demo: " << to_string(summary.error().code) << ": "
                  << summary.error().message << '\n';
        return tools::kExitRuntime;
    }
    const auto& s = *summary;
    std::cout << "users created " << s.users_created << " (existing " << s.users_existing
              << "), friendships " << s.friendships_created << ", posts " << s.posts_created
              << ", messages " << s.messages_sent << ", fixes " << s.fixes_recorded << '\n';
    for (const auto& c : s.conflicts) std::cout << "conflict: " << c << '\n';
    for (const auto& e : s.errors) std::cerr << "error: " << e << '\n';
    return s.errors.empty() ? tools::kExitOk : tools::kExitRuntime;
}
