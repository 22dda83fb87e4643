// Experiment runner: build a model from a config file, execute the enabled
// experiment recipes, emit CSV/JSON reports and a pass/fail summary.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "decaylab/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for commutator decay estimates"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run the experiments of a config file");
    run->add_option("config", config_path, "configuration file")->required();
    auto* list = app.add_subcommand("list-models", "one line per model kind");
    auto* schema = app.add_subcommand("print-schema", "print the config grammar");

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        std::cout << decaylab::list_models_table();
        return 0;
    }
    if (schema->parsed()) {
        std::cout << decaylab::config_schema_text();
        return 0;
    }

    std::ifstream f(config_path);
    if (!f) {
        std::cerr << "cannot read config '" << config_path << "'\n";
        return 2;
    }
    std::stringstream ss;
    ss << f.rdbuf();

    try {
        decaylab::ExperimentConfig cfg = decaylab::parse_config(ss.str());
        decaylab::RunResult rr = decaylab::run_experiments(cfg);
        std::ifstream sum(rr.directory / "summary.txt");
        std::cout << sum.rdbuf();
        return rr.exit_code;
    } catch (const decaylab::SchemaError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const decaylab::Error& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }
}
