#include "wavenet.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace wavecast {

namespace {

bool has_input_skip(const NetworkConfig& config)
{
    return config.num_conditions > 0 || config.channels.front() != 1;
}

template <typename Params, typename Fn>
void visit_filters(Params& params, Fn&& fn)
{
    ParamKey key = 0;
    fn(std::string("layer1.conv"), key++, params.dilated.at(0));
    if (params.input_skip) {
        fn(std::string("layer1.input_skip"), key++, *params.input_skip);
    }
    for (std::size_t c = 0; c < params.condition_filters.size(); ++c) {
        fn("condition" + std::to_string(c + 1) + ".conv", key++, params.condition_filters[c]);
    }
    for (std::size_t c = 0; c < params.condition_skips.size(); ++c) {
        fn("condition" + std::to_string(c + 1) + ".skip", key++, params.condition_skips[c]);
    }
    for (std::size_t l = 1; l < params.dilated.size(); ++l) {
        const std::string prefix = "layer" + std::to_string(l + 1);
        fn(prefix + ".conv", key++, params.dilated[l]);
        if (l - 1 < params.adapters.size() && params.adapters[l - 1]) {
            fn(prefix + ".adapter", key++, *params.adapters[l - 1]);
        }
    }
    fn(std::string("output"), key++, params.output);
}

std::size_t filter_size(std::size_t taps, std::size_t in, std::size_t out) { return taps * in * out + out; }

} // namespace

void validate(const NetworkConfig& config)
{
    require(config.layers >= 1, ErrorKind::Config, "network needs at least one layer");
    require(config.layers <= 24, ErrorKind::Config, "network depth above 24 layers is not supported");
    require(config.taps >= 1, ErrorKind::Config, "filter width must be at least 1");
    require(config.channels.size() == config.layers, ErrorKind::Config,
            "expected " + std::to_string(config.layers) + " channel counts, got " +
                std::to_string(config.channels.size()));
    for (std::size_t m : config.channels) {
        require(m >= 1, ErrorKind::Config, "every layer needs at least one channel");
    }
}

std::size_t dilation_of_layer(std::size_t layer_index) { return std::size_t{1} << layer_index; }

std::size_t receptive_field(const NetworkConfig& config)
{
    return dilation_of_layer(config.layers - 1) * config.taps;
}

std::size_t history_length(const NetworkConfig& config)
{
    return (config.taps - 1) * (dilation_of_layer(config.layers) - 1) + 1;
}

std::size_t parameter_count(const NetworkConfig& config)
{
    validate(config);
    const auto& m = config.channels;
    const std::size_t k = config.taps;
    std::size_t total = filter_size(k, 1, m[0]);
    if (has_input_skip(config)) {
        total += filter_size(1, 1, m[0]);
    }
    total += config.num_conditions * (filter_size(k, 1, m[0]) + filter_size(1, 1, m[0]));
    for (std::size_t l = 1; l < config.layers; ++l) {
        total += filter_size(k, m[l - 1], m[l]);
        if (m[l - 1] != m[l]) {
            total += filter_size(1, m[l - 1], m[l]);
        }
    }
    total += filter_size(1, m.back(), 1);
    return total;
}

void for_each_filter(const NetworkParams& params,
                     const std::function<void(const std::string&, ParamKey, const ConvFilter&)>& fn)
{
    visit_filters(params, fn);
}

void for_each_filter(NetworkParams& params, const std::function<void(const std::string&, ParamKey, ConvFilter&)>& fn)
{
    visit_filters(params, fn);
}

NetworkParams make_params(const NetworkConfig& config)
{
    validate(config);
    const auto& m = config.channels;
    const std::size_t k = config.taps;
    NetworkParams p;
    p.dilated.emplace_back(k, 1, m[0], 1);
    if (has_input_skip(config)) {
        p.input_skip = ConvFilter(1, 1, m[0], 1);
    }
    for (std::size_t c = 0; c < config.num_conditions; ++c) {
        p.condition_filters.emplace_back(k, 1, m[0], 1);
        p.condition_skips.emplace_back(1, 1, m[0], 1);
    }
    for (std::size_t l = 1; l < config.layers; ++l) {
        p.dilated.emplace_back(k, m[l - 1], m[l], dilation_of_layer(l));
        if (m[l - 1] != m[l]) {
            p.adapters.emplace_back(ConvFilter(1, m[l - 1], m[l], 1));
        } else {
            p.adapters.emplace_back(std::nullopt);
        }
    }
    p.output = ConvFilter(1, m.back(), 1, 1);
    return p;
}

NetworkParams init_params(const NetworkConfig& config, std::uint64_t seed)
{
    NetworkParams p = make_params(config);
    std::mt19937_64 rng(seed);
    auto he = [&](ConvFilter& f) {
        const double z = static_cast<double>(f.out_channels * f.taps);
        std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / z));
        for (double& w : f.weights) {
            w = dist(rng);
        }
    };
    // 1x1 shortcuts start as identity when shapes agree, else as a channel average.
    auto pass_through = [](ConvFilter& f) {
        for (std::size_t m = 0; m < f.in_channels; ++m) {
            for (std::size_t h = 0; h < f.out_channels; ++h) {
                double w = 1.0 / static_cast<double>(f.in_channels);
                if (f.in_channels == f.out_channels) {
                    w = (m == h) ? 1.0 : 0.0;
                }
                f.weights[m * f.out_channels + h] = w;
            }
        }
    };
    for_each_filter(p, [&](const std::string& name, ParamKey, ConvFilter& f) {
        if (name.ends_with(".conv")) {
            he(f);
        } else if (!name.ends_with(".skip")) {
            pass_through(f);  // input_skip, adapters, output; condition skips stay zero
        }
    });
    return p;
}

void check_compatible(const NetworkParams& params, const NetworkConfig& config)
{
    const NetworkParams expected = make_params(config);
    std::vector<std::pair<std::string, const ConvFilter*>> want;
    std::vector<std::pair<std::string, const ConvFilter*>> have;
    for_each_filter(expected, [&](const std::string& name, ParamKey, const ConvFilter& f) { want.emplace_back(name, &f); });
    for_each_filter(params, [&](const std::string& name, ParamKey, const ConvFilter& f) { have.emplace_back(name, &f); });
    require(want.size() == have.size(), ErrorKind::Config,
            "parameters hold " + std::to_string(have.size()) + " filters, config implies " + std::to_string(want.size()));
    for (std::size_t i = 0; i < want.size(); ++i) {
        const ConvFilter& a = *want[i].second;
        const ConvFilter& b = *have[i].second;
        have[i].second->validate();
        if (want[i].first != have[i].first || a.taps != b.taps || a.in_channels != b.in_channels ||
            a.out_channels != b.out_channels || a.dilation != b.dilation) {
            fail(ErrorKind::Config, "filter " + have[i].first + " does not match config filter " + want[i].first);
        }
    }
}

double squared_weight_sum(const NetworkParams& params)
{
    double total = 0.0;
    for_each_filter(params, [&](const std::string&, ParamKey, const ConvFilter& f) {
        for (double w : f.weights) {
            total += w * w;
        }
    });
    return total;
}

GradientTape::Var record_forward(GradientTape& tape, const NetworkParams& params, const NetworkConfig& config,
                                 std::span<const double> x, std::span<const std::vector<double>> conditions)
{
    require(!x.empty(), ErrorKind::Usage, "forward pass needs a non-empty series");
    if (conditions.size() != config.num_conditions) {
        fail(ErrorKind::Config, "network expects " + std::to_string(config.num_conditions) + " conditions, got " +
                                    std::to_string(conditions.size()));
    }
    for (std::size_t c = 0; c < conditions.size(); ++c) {
        if (conditions[c].size() != x.size()) {
            fail(ErrorKind::Config, "condition " + std::to_string(c + 1) + " has length " +
                                        std::to_string(conditions[c].size()) + ", target has " +
                                        std::to_string(x.size()));
        }
    }

    if (params.dilated.size() != config.layers || params.adapters.size() + 1 != config.layers ||
        params.condition_filters.size() != config.num_conditions ||
        params.condition_skips.size() != config.num_conditions) {
        fail(ErrorKind::Config, "parameters do not match the network config");
    }

    // Parameter keys follow for_each_filter's order.
    ParamKey next = 0;
    const ParamKey key_layer1 = next++;
    const ParamKey key_input_skip = params.input_skip ? next++ : 0;
    const ParamKey key_cond_conv = next;
    next += params.condition_filters.size();
    const ParamKey key_cond_skip = next;
    next += params.condition_skips.size();

    const std::size_t pad = history_length(config);
    const std::size_t first_span = params.dilated[0].span();

    auto padded_x = tape.left_pad(tape.constant(FeatureMap::from_series(x)), pad);
    auto h = tape.relu(tape.conv(padded_x, params.dilated[0], key_layer1));

    std::vector<GradientTape::Var> padded_conds;
    for (std::size_t c = 0; c < conditions.size(); ++c) {
        auto padded = tape.left_pad(tape.constant(FeatureMap::from_series(conditions[c])), pad);
        padded_conds.push_back(padded);
        h = tape.add(h, tape.relu(tape.conv(padded, params.condition_filters[c], key_cond_conv + c)));
    }

    auto shortcut = tape.drop_leading(padded_x, first_span);
    if (params.input_skip) {
        shortcut = tape.conv(shortcut, *params.input_skip, key_input_skip);
    }
    h = tape.add(h, shortcut);
    for (std::size_t c = 0; c < conditions.size(); ++c) {
        auto aligned = tape.drop_leading(padded_conds[c], first_span);
        h = tape.add(h, tape.conv(aligned, params.condition_skips[c], key_cond_skip + c));
    }

    for (std::size_t l = 1; l < params.dilated.size(); ++l) {
        const ConvFilter& f = params.dilated[l];
        auto z = tape.conv(h, f, next++);
        if (l + 1 < params.dilated.size() || config.final_activation == FinalActivation::Relu) {
            z = tape.relu(z);
        }
        auto residual = tape.drop_leading(h, f.span());
        if (params.adapters[l - 1]) {
            residual = tape.conv(residual, *params.adapters[l - 1], next++);
        }
        h = tape.add(z, residual);
    }

    return tape.conv(h, params.output, next);
}

std::vector<double> forward_conditional(const NetworkParams& params, const NetworkConfig& config,
                                        std::span<const double> x, std::span<const std::vector<double>> conditions)
{
    GradientTape tape;
    auto out = record_forward(tape, params, config, x, conditions);
    return tape.value(out).channel(0);
}

std::vector<double> forward_unconditional(const NetworkParams& params, const NetworkConfig& config,
                                          std::span<const double> x)
{
    require(config.num_conditions == 0, ErrorKind::Config, "unconditional forward on a conditional network");
    return forward_conditional(params, config, x, {});
}

double predict_next(const NetworkParams& params, const NetworkConfig& config, std::span<const double> window_x,
                    std::span<const std::vector<double>> window_conditions)
{
    const std::size_t need = history_length(config);
    if (window_x.size() < need) {
        fail(ErrorKind::Usage, "prediction window holds " + std::to_string(window_x.size()) + " values, needs " +
                                   std::to_string(need));
    }
    auto trailing = window_x.subspan(window_x.size() - need);
    std::vector<std::vector<double>> conds;
    for (const auto& c : window_conditions) {
        if (c.size() < need) {
            fail(ErrorKind::Usage, "condition window holds " + std::to_string(c.size()) + " values, needs " +
                                       std::to_string(need));
        }
        conds.emplace_back(c.end() - static_cast<std::ptrdiff_t>(need), c.end());
    }
    return forward_conditional(params, config, trailing, conds).back();
}

std::vector<double> forecast_n_steps(const NetworkParams& params, const NetworkConfig& config,
                                     std::span<const double> history_x,
                                     std::span<const std::vector<double>> history_conditions, std::size_t steps)
{
    require(steps > 0, ErrorKind::Usage, "forecast horizon must be positive");
    const std::size_t need = history_length(config);
    if (history_x.size() < need) {
        fail(ErrorKind::Usage, "forecast history holds " + std::to_string(history_x.size()) + " values, needs " +
                                   std::to_string(need));
    }
    require(history_conditions.size() == config.num_conditions, ErrorKind::Config,
            "forecast needs " + std::to_string(config.num_conditions) + " condition histories");

    std::vector<double> window(history_x.end() - static_cast<std::ptrdiff_t>(need), history_x.end());
    std::vector<std::vector<double>> cond_windows;
    for (const auto& c : history_conditions) {
        require(c.size() == history_x.size(), ErrorKind::Config, "condition history length differs from target");
        cond_windows.emplace_back(c.end() - static_cast<std::ptrdiff_t>(need), c.end());
    }

    std::vector<double> forecasts;
    forecasts.reserve(steps);
    for (std::size_t s = 0; s < steps; ++s) {
        const double next = predict_next(params, config, window, cond_windows);
        forecasts.push_back(next);
        std::rotate(window.begin(), window.begin() + 1, window.end());
        window.back() = next;
        for (auto& c : cond_windows) {
            const double held = c.back();
            std::rotate(c.begin(), c.begin() + 1, c.end());
            c.back() = held;
        }
    }
    return forecasts;
}

} // namespace wavecast
