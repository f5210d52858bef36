#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "exit_codes.hpp"
#include "geosocial/sim/scenario.hpp"

using namespace geosocial;

int main(int argc, char** argv) {
    CLI::App app{"Generate a localisation scenario from a JSON spec"};
    std::string spec_path, out_path;
    app.add_option("--spec", spec_path, "scenario spec (JSON)")->required();
    app.add_option("--out", out_path, "scenario file to write (NDJSON)")->required();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? tools::kExitOk : tools::kExitValidation;
    }

    std::ifstream in(spec_path);
    if (!in) {
        std::cerr << "cannot read " << spec_path << '\n';
        return tools::kExitRuntime;
    }
    std::stringstream text;
    text << in.rdbuf();
    auto spec = sim::parse_spec(text.str());
    if (!spec) {
        std::cerr << "invalid spec: " << spec.error().message << '\n';
        return tools::kExitValidation;
    }
    auto scenario = sim::generate(*spec);
    if (!scenario) {
        std::cerr << "invalid spec: " << scenario.error().message << '\n';
        return tools::kExitValidation;
    }
    std::ofstream out(out_path, std::ios::binary);
    sim::write_scenario(out, *scenario);
    out.close();
    if (!out) {
        std::cerr << "cannot write " << out_path << '\n';
        return tools::kExitRuntime;
    }
    std::cout << scenario->trials.size() << " trials, " << scenario->rps.size()
              << " reference points -> " << out_path << '\n';
    return tools::kExitOk;
}
