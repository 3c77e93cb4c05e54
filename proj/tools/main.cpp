#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "foilwind/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Frequency-domain foil winding simulator"};
    app.require_subcommand(1);

    foilwind::RunOptions options;
    std::optional<std::string> output_dir;

    auto add = [&](const std::string& name, const std::string& help, bool needs_freq) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("config", options.config_path, "YAML configuration file")->required();
        sub->add_option("-o,--output", output_dir, "output directory (overrides config and FOILWIND_OUTPUT_DIR)");
        if (needs_freq) {
            sub->add_option("-f,--freq", options.frequency, "frequency in Hz")->required();
        }
        sub->callback([&options, name] { options.command = name; });
    };
    add("solve", "solve at one frequency", true);
    add("sweep", "impedance sweep over the configured frequencies", false);
    add("profiles", "voltage function, current profiles and flux lines at one frequency", true);
    add("oracle-compare", "compare against the DC resistance and resolved-turn ladder oracles", false);
    add("dump-matrices", "write the assembled blocks in MatrixMarket format", false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : foilwind::exit_config_error;
    }
    options.output_dir = output_dir;
    return foilwind::run(options, std::cout, std::cerr);
}
