#pragma once

#include "capi_util.hpp"

#include <CLI11.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace cli {

/// Everything one run needs: data source, model choice, architecture,
/// training protocol, split plan and output directory.
struct Experiment {
    // data source: exactly one of `data` and `lorenz`
    std::string data;
    bool lorenz = false;
    wc_lorenz_config lorenz_config{};
    std::string target;
    std::vector<std::string> conds;
    std::string timestamp;
    bool forward_fill = false;
    bool returns = false;
    bool no_normalize = false;

    std::string model = "uwn";
    std::size_t layers = 4;
    std::size_t taps = 2;
    std::vector<std::size_t> channels{1};
    std::string final_activation = "linear";
    wc_train_config train{};
    std::string train_config;  // optional JSON file with train fields
    std::size_t order = 16;

    std::size_t train_len = 0;  // 0: 1000 for --lorenz, else 750
    std::size_t test_len = 0;   // 0: 500 for --lorenz, else 350
    std::string scale = "auto";
    std::string out;

    // forecast only
    std::size_t steps = 0;
    long split = -1;
    long origin = -1;

    bool is_network() const { return model == "uwn" || model == "cwn"; }
};

enum class Command { Train, Evaluate, Forecast };

void add_lorenz_options(CLI::App& app, wc_lorenz_config& config);

/// Registers the experiment flags on `app`, bound to `exp`.
void add_experiment_options(CLI::App& app, Experiment& exp, Command command);

/// Applies --train-config and flag precedence after parsing; train fields
/// given on the command line override the JSON file.
void resolve(CLI::App& app, Experiment& exp);

/// Network config built from the experiment flags.
wc_network_config network_config(const Experiment& exp);

/// Config-file text (CLI11 TOML syntax) reproducing the resolved experiment.
std::string echo_config(const Experiment& exp);

/// Data series after column selection and the optional returns transform.
Series load_series(const Experiment& exp);

std::vector<wc_split> splits_for(const Experiment& exp, std::size_t length);

/// "original" or "normalized".
std::string metric_scale(const Experiment& exp);

/// Full validation without side effects; loads the data to check columns and lengths.
void validate_experiment(const Experiment& exp, Command command);

} // namespace cli
