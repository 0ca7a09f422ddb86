#pragma once

#include "experiment.hpp"

#include <string>

namespace cli {

int cmd_generate_lorenz(const wc_lorenz_config& config, const std::string& out_path);
int cmd_train(const Experiment& exp);
int cmd_evaluate(const Experiment& exp);
int cmd_forecast(const Experiment& exp);

} // namespace cli
