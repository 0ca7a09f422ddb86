#pragma once

#include "tape.hpp"
#include "wavenet.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wavecast {

struct TrainConfig {
    std::size_t iterations = 20000;
    double learning_rate = 0.001;
    double l2_gamma = 0.001;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::size_t num_seeds = 3;
    std::size_t seed_pool = 5;
    /// A pool member is discarded when its training MAE exceeds this multiple of the pool median.
    double discard_ratio = 1.5;
    std::uint64_t base_seed = 1;
    /// Worker threads for train_ensemble; results do not depend on it.
    std::size_t jobs = 1;

    bool operator==(const TrainConfig&) const = default;
};

void validate(const TrainConfig& config);

/// Reads a JSON object whose keys are the TrainConfig field names. Missing
/// keys keep their defaults; unknown keys are rejected.
TrainConfig load_train_config(const std::string& path);
TrainConfig merge_train_config(TrainConfig base, const std::string& json_text);
std::string train_config_to_json(const TrainConfig& config);

struct TrainReport {
    std::uint64_t seed = 0;
    std::vector<double> loss_trace;  // objective before each update
    NetworkParams final_params;
    double initial_mae = 0.0;
    double train_mae = 0.0;
    bool diverged = false;
    std::string failure;  // set when diverged
};

/// mean|pred - target| + (gamma / 2) * weight_sq_sum.
double objective(std::span<const double> predictions, std::span<const double> targets, double gamma,
                 double weight_sq_sum);
double objective(const NetworkParams& params, std::span<const double> predictions, std::span<const double> targets,
                 double gamma);

/// First and second moment estimates, one pair of vectors per filter (weights then biases).
struct AdamState {
    std::vector<std::vector<double>> first;
    std::vector<std::vector<double>> second;

    static AdamState zeros_like(const NetworkParams& params);
};

/// One bias-corrected Adam update. `iteration` is 1-based. Throws a numeric
/// error naming the parameter if any gradient entry is non-finite; params are
/// left untouched in that case.
void adam_step(NetworkParams& params, const Gradients& grads, AdamState& state, const TrainConfig& config,
               std::size_t iteration);

/// Objective, predictions and gradients for one full-batch pass.
struct Evaluation {
    double objective = 0.0;
    double mae = 0.0;
    Gradients gradients;
};
Evaluation evaluate_objective(const NetworkParams& params, const NetworkConfig& net, std::span<const double> x,
                              std::span<const std::vector<double>> conditions, double gamma);

/// Training MAE over targets x(1..N-1).
double train_mae(const NetworkParams& params, const NetworkConfig& net, std::span<const double> x,
                 std::span<const std::vector<double>> conditions);

/// Full-batch Adam for config.iterations steps from init_params(net, seed).
/// Returns a diverged report holding the last finite parameters instead of
/// throwing when the loss or a gradient becomes non-finite.
TrainReport train(const NetworkConfig& net, const TrainConfig& config, std::span<const double> x,
                  std::span<const std::vector<double>> conditions, std::uint64_t seed);

/// Same as train() but starting from the given parameters.
TrainReport train_from(const NetworkConfig& net, const TrainConfig& config, std::span<const double> x,
                       std::span<const std::vector<double>> conditions, NetworkParams initial, std::uint64_t seed);

/// Seed of pool member `index` for a given base seed.
std::uint64_t member_seed(std::uint64_t base_seed, std::size_t index);

/// Drops diverged members and members whose training MAE exceeds
/// discard_ratio times the pool median, then keeps the `keep` best (ascending MAE).
std::vector<TrainReport> select_networks(std::vector<TrainReport> pool, std::size_t keep, double discard_ratio);

/// Trains config.seed_pool networks and returns select_networks() of them.
/// Throws a numeric error if every member diverged.
std::vector<TrainReport> train_ensemble(const NetworkConfig& net, const TrainConfig& config, std::span<const double> x,
                                        std::span<const std::vector<double>> conditions);

std::string loss_trace_csv(const TrainReport& report);

} // namespace wavecast
