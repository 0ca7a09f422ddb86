#include "experiment.hpp"

#include <filesystem>
#include <sstream>

namespace cli {

namespace {

const char* lorenz_names[] = {"X", "Y", "Z"};

std::string quoted(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string lorenz_target(const Experiment& exp) { return exp.target.empty() ? "X" : exp.target; }

std::vector<std::size_t> expanded_channels(const Experiment& exp)
{
    if (exp.channels.size() == 1) {
        return std::vector<std::size_t>(exp.layers, exp.channels[0]);
    }
    if (exp.channels.size() != exp.layers) {
        config_error("--channels needs one value or one per layer (" + std::to_string(exp.layers) + "), got " +
                     std::to_string(exp.channels.size()));
    }
    return exp.channels;
}

} // namespace

void add_lorenz_options(CLI::App& app, wc_lorenz_config& c)
{
    app.add_option("--sigma", c.sigma, "Lorenz sigma")->capture_default_str();
    app.add_option("--rho", c.rho, "Lorenz rho")->capture_default_str();
    app.add_option("--beta", c.beta, "Lorenz beta")->capture_default_str();
    app.add_option("--x0", c.x0, "Initial X")->capture_default_str();
    app.add_option("--y0", c.y0, "Initial Y")->capture_default_str();
    app.add_option("--z0", c.z0, "Initial Z")->capture_default_str();
    app.add_option("--points", c.num_points, "Number of samples")->capture_default_str();
    app.add_option("--dt", c.dt, "Sample spacing")->capture_default_str();
    app.add_option("--substeps", c.substeps, "RK4 steps per sample")->capture_default_str();
    app.add_flag("--as-printed", c.as_printed, "Use dZ/dt = XY - beta*Y instead of XY - beta*Z");
}

void add_experiment_options(CLI::App& app, Experiment& exp, Command command)
{
    wc_lorenz_config_default(&exp.lorenz_config);
    wc_train_config_default(&exp.train);

    app.set_config("--config", "", "Config file in TOML syntax; command-line flags override it");

    app.add_option("--data", exp.data, "CSV input with a header row")->group("Data");
    app.add_flag("--lorenz", exp.lorenz, "Generate the Lorenz series in memory instead of reading --data")
        ->group("Data");
    add_lorenz_options(app, exp.lorenz_config);
    app.add_option("--target", exp.target, "Target column (default X with --lorenz)")->group("Data");
    app.add_option("--cond", exp.conds, "Condition columns, comma separated")->delimiter(',')->group("Data");
    app.add_option("--timestamp", exp.timestamp, "Timestamp column carried into forecast files")->group("Data");
    app.add_flag("--forward-fill", exp.forward_fill, "Fill empty cells from the previous row")->group("Data");
    app.add_flag("--returns", exp.returns, "Model simple returns of the columns instead of levels")->group("Data");
    app.add_flag("--no-normalize", exp.no_normalize, "Skip standardization with training-window statistics")
        ->group("Data");

    app.add_option("--model", exp.model, "uwn | cwn | ar | var | naive")
        ->check(CLI::IsMember({"uwn", "cwn", "ar", "var", "naive"}))
        ->capture_default_str()
        ->group("Model");
    app.add_option("--layers", exp.layers, "Dilated layers L")->capture_default_str()->group("Model");
    app.add_option("--taps", exp.taps, "Filter width k")->capture_default_str()->group("Model");
    app.add_option("--channels", exp.channels, "Channels per layer, one value or one per layer")
        ->delimiter(',')
        ->capture_default_str()
        ->group("Model");
    app.add_option("--final-activation", exp.final_activation, "Activation of layer L: linear | relu")
        ->check(CLI::IsMember({"linear", "relu"}))
        ->capture_default_str()
        ->group("Model");
    app.add_option("--order", exp.order, "Lag order of ar / var")->capture_default_str()->group("Model");

    app.add_option("--iterations", exp.train.iterations, "Adam iterations")->capture_default_str()->group("Training");
    app.add_option("--lr", exp.train.learning_rate, "Adam learning rate")->capture_default_str()->group("Training");
    app.add_option("--gamma", exp.train.l2_gamma, "L2 regularization rate")->capture_default_str()->group("Training");
    app.add_option("--seeds", exp.train.num_seeds, "Selected networks")->capture_default_str()->group("Training");
    app.add_option("--seed-pool", exp.train.seed_pool, "Networks trained before selection")
        ->capture_default_str()
        ->group("Training");
    app.add_option("--discard-ratio", exp.train.discard_ratio, "Discard members above this multiple of the median MAE")
        ->capture_default_str()
        ->group("Training");
    app.add_option("--seed", exp.train.base_seed, "Base seed")->capture_default_str()->group("Training");
    app.add_option("--jobs", exp.train.jobs, "Parallel training runs")->capture_default_str()->group("Training");
    app.add_option("--train-config", exp.train_config, "JSON file with train fields (flags override it)")
        ->group("Training");

    app.add_option("--train-len", exp.train_len, "Training rows per split (default 1000 with --lorenz, else 750)")
        ->group("Splits");
    app.add_option("--test-len", exp.test_len, "Test rows per split (default 500 with --lorenz, else 350)")
        ->group("Splits");
    app.add_option("--scale", exp.scale, "Metric scale: auto | original | normalized")
        ->check(CLI::IsMember({"auto", "original", "normalized"}))
        ->capture_default_str()
        ->group("Splits");
    app.add_option("--out", exp.out, "Output directory")->required();

    if (command == Command::Forecast) {
        app.add_option("--steps", exp.steps, "Forecast horizon")->required();
        app.add_option("--split", exp.split, "Split whose models are used (default: last)");
        app.add_option("--origin", exp.origin, "First forecast row (default: test start of the split)");
    }
}

void resolve(CLI::App& app, Experiment& exp)
{
    if (exp.train_config.empty()) {
        return;
    }
    wc_train_config file;
    wc_train_config_default(&file);
    check(wc_train_config_load(exp.train_config.c_str(), &file), "--train-config");
    auto keep = [&](const char* flag, auto& field, auto value) {
        if (app.count(flag) == 0) field = value;
    };
    keep("--iterations", exp.train.iterations, file.iterations);
    keep("--lr", exp.train.learning_rate, file.learning_rate);
    keep("--gamma", exp.train.l2_gamma, file.l2_gamma);
    keep("--seeds", exp.train.num_seeds, file.num_seeds);
    keep("--seed-pool", exp.train.seed_pool, file.seed_pool);
    keep("--discard-ratio", exp.train.discard_ratio, file.discard_ratio);
    keep("--seed", exp.train.base_seed, file.base_seed);
    keep("--jobs", exp.train.jobs, file.jobs);
    // Adam constants have no flags.
    exp.train.adam_beta1 = file.adam_beta1;
    exp.train.adam_beta2 = file.adam_beta2;
    exp.train.adam_eps = file.adam_eps;
    exp.train_config.clear();
}

wc_network_config network_config(const Experiment& exp)
{
    wc_network_config c;
    wc_network_config_default(&c);
    if (exp.layers == 0 || exp.layers > WC_MAX_LAYERS) {
        config_error("--layers must be in 1.." + std::to_string(WC_MAX_LAYERS));
    }
    c.layers = exp.layers;
    c.taps = exp.taps;
    const auto ch = expanded_channels(exp);
    for (std::size_t l = 0; l < ch.size(); ++l) {
        c.channels[l] = ch[l];
    }
    c.num_conditions = exp.model == "cwn" ? exp.conds.size() : 0;
    c.final_relu = exp.final_activation == "relu";
    return c;
}

std::string echo_config(const Experiment& exp)
{
    std::ostringstream o;
    auto line = [&](const char* key, const std::string& value) { o << key << " = " << value << "\n"; };
    auto num = [](double v) { return fmt(v); };
    auto flag = [](bool b) { return std::string(b ? "true" : "false"); };
    auto list = [](const auto& items, auto conv) {
        std::string s = "[";
        for (std::size_t i = 0; i < items.size(); ++i) {
            s += (i ? ", " : "") + conv(items[i]);
        }
        return s + "]";
    };
    o << "# resolved wavecast configuration\n";
    if (!exp.data.empty()) line("data", quoted(exp.data));
    line("lorenz", flag(exp.lorenz));
    const auto& l = exp.lorenz_config;
    line("sigma", num(l.sigma));
    line("rho", num(l.rho));
    line("beta", num(l.beta));
    line("x0", num(l.x0));
    line("y0", num(l.y0));
    line("z0", num(l.z0));
    line("points", std::to_string(l.num_points));
    line("dt", num(l.dt));
    line("substeps", std::to_string(l.substeps));
    line("as-printed", flag(l.as_printed != 0));
    if (!exp.target.empty()) line("target", quoted(exp.target));
    if (!exp.conds.empty()) line("cond", list(exp.conds, quoted));
    if (!exp.timestamp.empty()) line("timestamp", quoted(exp.timestamp));
    line("forward-fill", flag(exp.forward_fill));
    line("returns", flag(exp.returns));
    line("no-normalize", flag(exp.no_normalize));
    line("model", quoted(exp.model));
    line("layers", std::to_string(exp.layers));
    line("taps", std::to_string(exp.taps));
    line("channels", list(exp.channels, [](std::size_t v) { return std::to_string(v); }));
    line("final-activation", quoted(exp.final_activation));
    line("order", std::to_string(exp.order));
    line("iterations", std::to_string(exp.train.iterations));
    line("lr", num(exp.train.learning_rate));
    line("gamma", num(exp.train.l2_gamma));
    line("seeds", std::to_string(exp.train.num_seeds));
    line("seed-pool", std::to_string(exp.train.seed_pool));
    line("discard-ratio", num(exp.train.discard_ratio));
    line("seed", std::to_string(exp.train.base_seed));
    line("jobs", std::to_string(exp.train.jobs));
    if (exp.train_len) line("train-len", std::to_string(exp.train_len));
    if (exp.test_len) line("test-len", std::to_string(exp.test_len));
    line("scale", quoted(exp.scale));
    line("out", quoted(exp.out));
    return o.str();
}

Series load_series(const Experiment& exp)
{
    wc_series* raw = nullptr;
    if (exp.lorenz) {
        const auto n = exp.lorenz_config.num_points;
        std::vector<double> xyz[3] = {std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
        check(wc_lorenz_generate(&exp.lorenz_config, xyz[0].data(), xyz[1].data(), xyz[2].data()), "lorenz");
        auto column = [&](const std::string& name) -> const std::vector<double>& {
            for (int i = 0; i < 3; ++i) {
                if (name == lorenz_names[i]) return xyz[i];
            }
            data_error("unknown column '" + name + "' (the Lorenz source has X, Y, Z)");
        };
        const std::string target = lorenz_target(exp);
        std::vector<const double*> conds;
        std::vector<const char*> names;
        for (const auto& c : exp.conds) {
            conds.push_back(column(c).data());
            names.push_back(c.c_str());
        }
        check(wc_series_create(target.c_str(), column(target).data(), n, names.data(), conds.data(), conds.size(), &raw),
              "lorenz series");
    } else {
        std::vector<const char*> names;
        for (const auto& c : exp.conds) {
            names.push_back(c.c_str());
        }
        check(wc_series_load_csv(exp.data.c_str(), exp.target.c_str(), names.data(), names.size(),
                                 exp.timestamp.empty() ? nullptr : exp.timestamp.c_str(), exp.forward_fill, &raw),
              exp.data);
    }
    Series series(raw);
    if (exp.returns) {
        wc_series* r = nullptr;
        check(wc_series_to_returns(series.get(), &r), "returns");
        series.reset(r);
    }
    return series;
}

std::vector<wc_split> splits_for(const Experiment& exp, std::size_t length)
{
    const std::size_t train = exp.train_len ? exp.train_len : (exp.lorenz ? 1000 : 750);
    const std::size_t test = exp.test_len ? exp.test_len : (exp.lorenz ? 500 : 350);
    std::size_t count = 0;
    check(wc_make_splits(length, train, test, nullptr, 0, &count), "splits");
    std::vector<wc_split> out(count);
    check(wc_make_splits(length, train, test, out.data(), out.size(), &count), "splits");
    return out;
}

std::string metric_scale(const Experiment& exp)
{
    if (exp.scale != "auto") return exp.scale;
    return exp.returns ? "normalized" : "original";
}

void validate_experiment(const Experiment& exp, Command command)
{
    if (exp.lorenz == !exp.data.empty()) {
        config_error("give exactly one data source: --data FILE or --lorenz");
    }
    if (!exp.data.empty()) {
        if (!std::filesystem::is_regular_file(exp.data)) {
            data_error("data file " + exp.data + " does not exist");
        }
        if (exp.target.empty()) config_error("--target is required with --data");
    }
    if ((exp.model == "uwn" || exp.model == "ar" || exp.model == "naive") && !exp.conds.empty()) {
        config_error("--model " + exp.model + " uses the target only; drop --cond or use cwn / var");
    }
    if ((exp.model == "cwn" || exp.model == "var") && exp.conds.empty()) {
        config_error("--model " + exp.model + " needs at least one --cond column");
    }
    if (exp.order == 0) config_error("--order must be at least 1");

    const wc_network_config net = network_config(exp);
    std::size_t history = 0;
    check(wc_network_history_length(&net, &history), "network");
    {
        char* json = nullptr;
        check(wc_train_config_to_json(&exp.train, &json), "training");
        wc_string_free(json);
    }

    const Series series = load_series(exp);
    const std::size_t length = wc_series_length(series.get());
    const auto splits = splits_for(exp, length);
    const std::size_t train_len = splits.front().train_end - splits.front().train_begin;
    if (exp.is_network() && train_len <= history) {
        config_error("training window of " + std::to_string(train_len) + " rows does not exceed the network history " +
                     std::to_string(history));
    }
    if ((exp.model == "ar" || exp.model == "var") && train_len <= exp.order) {
        config_error("training window of " + std::to_string(train_len) + " rows does not exceed --order " +
                     std::to_string(exp.order));
    }
    if (command == Command::Forecast) {
        if (exp.steps == 0) config_error("--steps must be at least 1");
        if (exp.split >= static_cast<long>(splits.size())) {
            config_error("--split " + std::to_string(exp.split) + " is out of range (" + std::to_string(splits.size()) +
                         " splits)");
        }
        if (exp.origin >= 0 && static_cast<std::size_t>(exp.origin) > length) {
            config_error("--origin is past the end of the data");
        }
    }
}

} // namespace cli
