#pragma once

#include "baselines.hpp"
#include "datagen.hpp"
#include "wavenet.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wavecast {

enum class ModelKind { WaveNet, AutoRegressive };

/// What a model was trained on.
struct CheckpointMeta {
    std::string target_name;
    std::vector<std::string> condition_names;
    std::optional<NormStats> norm;
    std::uint64_t seed = 0;
    double train_mae = 0.0;
    std::size_t train_begin = 0;
    std::size_t train_end = 0;

    bool operator==(const CheckpointMeta&) const = default;
};

/// One trained model. `network`/`params` are used for WaveNet, `ar` for
/// AutoRegressive.
struct Checkpoint {
    ModelKind kind = ModelKind::WaveNet;
    NetworkConfig network;
    NetworkParams params;
    ARModel ar;
    CheckpointMeta meta;

    bool operator==(const Checkpoint&) const = default;
};

inline constexpr int checkpoint_format_version = 1;

/// JSON document, fields in this order:
///   format ("wavecast-checkpoint"), format_version, kind ("wavenet" | "ar"),
///   config (wavenet only), ar (ar only), metadata, filters (wavenet only).
/// Each filter is {name, taps, in_channels, out_channels, dilation, weights, bias}
/// in for_each_filter() order; weights are flat in ConvFilter layout.
/// Doubles are written in shortest round-trip form, so load(save(c)) == c bitwise.
std::string checkpoint_to_json(const Checkpoint& checkpoint);

/// Throws a format error on a malformed, unknown-version or self-inconsistent document.
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

/// Field-by-field differences, one "field: a vs b" line each; empty when equal.
std::string config_diff(const NetworkConfig& expected, const NetworkConfig& actual);

/// Throws a format error listing config_diff() when the stored network differs.
void require_network(const Checkpoint& checkpoint, const NetworkConfig& expected);

void save_params(const NetworkParams& params, const NetworkConfig& config, const std::string& path);

/// Parameters and the config stored alongside them. When `expected` is
/// given, a differing stored config is a format error.
std::pair<NetworkParams, NetworkConfig> load_params(const std::string& path,
                                                    const std::optional<NetworkConfig>& expected = std::nullopt);

} // namespace wavecast
