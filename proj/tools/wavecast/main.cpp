#include "commands.hpp"

#include <cstring>
#include <iostream>

namespace {

const char* usage =
    "usage: wavecast <command> [options]\n"
    "\n"
    "commands:\n"
    "  generate-lorenz  write a Lorenz trajectory as an X,Y,Z CSV\n"
    "  train            train models on every split and write checkpoints\n"
    "  evaluate         score one-step forecasts of the trained models\n"
    "  forecast         recursive n-step forecast from trained models\n"
    "\n"
    "run 'wavecast <command> --help' for the options of a command\n"
    "exit codes: 0 ok, 1 config or usage error, 2 data error, 3 numeric failure\n";

int run(int argc, char** argv)
{
    if (argc < 2 || std::strcmp(argv[1], "--help") == 0 || std::strcmp(argv[1], "-h") == 0) {
        std::cout << usage;
        return argc < 2 ? cli::exit_config : cli::exit_ok;
    }
    if (std::strcmp(argv[1], "--version") == 0) {
        std::cout << "wavecast " << wc_version() << "\n";
        return cli::exit_ok;
    }
    const std::string command = argv[1];
    CLI::App app("wavecast " + command, "wavecast " + command);
    app.option_defaults()->always_capture_default();

    if (command == "generate-lorenz") {
        wc_lorenz_config config;
        wc_lorenz_config_default(&config);
        std::string out;
        app.set_config("--config", "", "Config file in TOML syntax; command-line flags override it");
        cli::add_lorenz_options(app, config);
        app.add_option("--out", out, "CSV file to write")->required();
        try {
            app.parse(argc - 1, argv + 1);
        } catch (const CLI::ParseError& e) {
            return app.exit(e) == 0 ? cli::exit_ok : cli::exit_config;
        }
        return cli::cmd_generate_lorenz(config, out);
    }

    cli::Command which;
    if (command == "train") {
        which = cli::Command::Train;
    } else if (command == "evaluate") {
        which = cli::Command::Evaluate;
    } else if (command == "forecast") {
        which = cli::Command::Forecast;
    } else {
        std::cerr << "wavecast: unknown command '" << command << "'\n\n" << usage;
        return cli::exit_config;
    }
    cli::Experiment exp;
    cli::add_experiment_options(app, exp, which);
    try {
        app.parse(argc - 1, argv + 1);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? cli::exit_ok : cli::exit_config;
    }
    cli::resolve(app, exp);
    switch (which) {
    case cli::Command::Train: return cli::cmd_train(exp);
    case cli::Command::Evaluate: return cli::cmd_evaluate(exp);
    case cli::Command::Forecast: return cli::cmd_forecast(exp);
    }
    return cli::exit_config;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const cli::CliError& e) {
        std::cerr << "wavecast: " << e.what() << "\n";
        return e.code();
    } catch (const std::exception& e) {
        std::cerr << "wavecast: " << e.what() << "\n";
        return cli::exit_config;
    }
}
