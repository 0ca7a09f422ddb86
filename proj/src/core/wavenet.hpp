#pragma once

#include "feature_map.hpp"
#include "tape.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wavecast {

enum class FinalActivation { Relu, Linear };

/// Architecture of a stacked dilated causal convolution network. Layer l
/// (1-based) has dilation 2^(l-1) and `channels[l-1]` output channels.
struct NetworkConfig {
    std::size_t layers = 4;
    std::size_t taps = 2;
    std::vector<std::size_t> channels{1, 1, 1, 1};
    std::size_t num_conditions = 0;
    FinalActivation final_activation = FinalActivation::Linear;  // activation of layer L

    bool operator==(const NetworkConfig&) const = default;
};

/// Throws a config error on an invalid architecture.
void validate(const NetworkConfig& config);

/// 2^(L-1) * k.
std::size_t receptive_field(const NetworkConfig& config);

/// Number of trailing inputs one prediction sees: (k - 1)(2^L - 1) + 1.
/// This is also the left padding applied to every input series. Equal to
/// receptive_field() for k = 2.
std::size_t history_length(const NetworkConfig& config);

std::size_t dilation_of_layer(std::size_t layer_index);

/// Closed-form count of weights plus biases.
std::size_t parameter_count(const NetworkConfig& config);

/// All trainable filters. The layer-1 input shortcut is parametrized when
/// the network is conditional or M_1 != 1, and is a plain identity residual
/// otherwise. Later layers use a 1x1 residual adapter only where the channel
/// count changes.
struct NetworkParams {
    std::vector<ConvFilter> dilated;                  // one per layer
    std::optional<ConvFilter> input_skip;             // layer-1 shortcut from the padded input
    std::vector<ConvFilter> condition_filters;        // 1 x k, one per condition
    std::vector<ConvFilter> condition_skips;          // 1 x 1, one per condition
    std::vector<std::optional<ConvFilter>> adapters;  // residual adapters for layers 2..L
    ConvFilter output;                                // 1 x 1, M_L -> 1

    bool operator==(const NetworkParams&) const = default;
};

/// Visits every filter in the fixed serialization order, passing a stable
/// name and the ParamKey used on the gradient tape.
void for_each_filter(const NetworkParams& params,
                     const std::function<void(const std::string&, ParamKey, const ConvFilter&)>& fn);
void for_each_filter(NetworkParams& params, const std::function<void(const std::string&, ParamKey, ConvFilter&)>& fn);

/// Zero-initialised parameters with shapes fixed by the config.
NetworkParams make_params(const NetworkConfig& config);

/// Dilated and condition filters (the ones feeding a ReLU) get Gaussian
/// weights with standard deviation sqrt(2 / z), z = out_channels * taps. The
/// input shortcut, adapters and output start as pass-through (identity, or
/// 1/in_channels when shapes differ) and condition skips start at zero, so a
/// fresh network ignores its conditions. Biases are zero. Deterministic in `seed`.
NetworkParams init_params(const NetworkConfig& config, std::uint64_t seed);

/// Throws a config error when the parameter shapes do not match `config`.
void check_compatible(const NetworkParams& params, const NetworkConfig& config);

/// Sum of squared weights over every filter (biases excluded).
double squared_weight_sum(const NetworkParams& params);

/// Records the network on `tape`. Returns an (N + 1) x 1 node whose entry i
/// is the prediction of x(i) from x(i - history .. i - 1) and the same
/// window of every condition; entry 0 sees only padding.
GradientTape::Var record_forward(GradientTape& tape, const NetworkParams& params, const NetworkConfig& config,
                                 std::span<const double> x, std::span<const std::vector<double>> conditions);

std::vector<double> forward_unconditional(const NetworkParams& params, const NetworkConfig& config,
                                          std::span<const double> x);
std::vector<double> forward_conditional(const NetworkParams& params, const NetworkConfig& config,
                                        std::span<const double> x, std::span<const std::vector<double>> conditions);

/// One-step forecast from the trailing history_length() values of each window.
double predict_next(const NetworkParams& params, const NetworkConfig& config, std::span<const double> window_x,
                    std::span<const std::vector<double>> window_conditions);

/// Recursive n-step forecast. Each forecast is appended to the target
/// history; condition series are held at their last observed value.
std::vector<double> forecast_n_steps(const NetworkParams& params, const NetworkConfig& config,
                                     std::span<const double> history_x,
                                     std::span<const std::vector<double>> history_conditions, std::size_t steps);

} // namespace wavecast
