#include "check_error.hpp"
#include "core/checkpoint.hpp"
#include "core/datagen.hpp"
#include "core/trainer.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

using namespace wavecast;

namespace {

std::string temp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / ("wavecast_test_" + name)).string();
}

Checkpoint random_checkpoint(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    Checkpoint c;
    c.network.layers = 3;
    c.network.channels = {2, 3, 1};
    c.network.num_conditions = 1;
    c.params = make_params(c.network);
    for_each_filter(c.params, [&](const std::string&, ParamKey, ConvFilter& f) {
        f.weights = oracle::normal_vector(rng, f.weights.size());
        f.bias = oracle::normal_vector(rng, f.bias.size());
    });
    c.meta.target_name = "X";
    c.meta.condition_names = {"Y"};
    c.meta.norm = NormStats{0.1 / 3.0, 7.25};
    c.meta.seed = 0xFFFFFFFFFFFFFFFFull;
    c.meta.train_mae = 1.0 / 7.0;
    c.meta.train_begin = 0;
    c.meta.train_end = 1000;
    return c;
}

} // namespace

TEST_CASE("checkpoints round-trip bitwise")
{
    auto c = random_checkpoint(1);
    auto text = checkpoint_to_json(c);
    CHECK(checkpoint_from_json(text) == c);

    auto path = temp_path("ckpt.json");
    save_checkpoint(c, path);
    CHECK(load_checkpoint(path) == c);

    save_params(c.params, c.network, path);
    auto [params, config] = load_params(path, c.network);
    CHECK(params == c.params);
    CHECK(config == c.network);
    std::filesystem::remove(path);

    Checkpoint ar;
    ar.kind = ModelKind::AutoRegressive;
    ar.ar.order = 2;
    ar.ar.num_features = 2;
    ar.ar.coefficients = {{0.1, 0.2, 0.3, 0.4, 1e-300}, {-1.0 / 3.0, 0, 0, 0, 5}};
    ar.meta.target_name = "A";
    ar.meta.condition_names = {"B"};
    CHECK(checkpoint_from_json(checkpoint_to_json(ar)) == ar);
}

TEST_CASE("document layout is ordered and self-describing")
{
    auto j = nlohmann::ordered_json::parse(checkpoint_to_json(random_checkpoint(2)));
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) {
        keys.push_back(it.key());
    }
    CHECK(keys == std::vector<std::string>{"format", "format_version", "kind", "config", "metadata", "filters"});
    CHECK(j["format_version"] == checkpoint_format_version);
    CHECK(j["filters"][0]["name"] == "layer1.conv");
}

TEST_CASE("incompatible and corrupt checkpoints are rejected")
{
    auto c = random_checkpoint(3);
    auto path = temp_path("ckpt_bad.json");
    save_params(c.params, c.network, path);
    NetworkConfig other = c.network;
    other.layers = 4;
    other.channels = {2, 3, 1, 1};
    bool diff_named = false;
    try {
        load_params(path, other);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Format);
        diff_named = std::string(e.what()).find("layers: 4 vs 3") != std::string::npos;
    }
    CHECK(diff_named);
    CHECK(config_diff(c.network, c.network).empty());

    auto text = checkpoint_to_json(c);
    CHECK_ERROR_KIND(checkpoint_from_json(text.substr(0, text.size() / 2)), ErrorKind::Format);
    auto j = nlohmann::ordered_json::parse(text);
    auto edited = j;
    edited["format_version"] = 99;
    CHECK_ERROR_KIND(checkpoint_from_json(edited.dump()), ErrorKind::Format);
    edited = j;
    edited["filters"][0]["weights"].erase(0);
    CHECK_ERROR_KIND(checkpoint_from_json(edited.dump()), ErrorKind::Format);
    edited = j;
    edited["filters"].erase(1);
    CHECK_ERROR_KIND(checkpoint_from_json(edited.dump()), ErrorKind::Format);
    edited = j;
    edited["metadata"]["conditions"] = nlohmann::json::array();
    CHECK_ERROR_KIND(checkpoint_from_json(edited.dump()), ErrorKind::Format);
    edited = j;
    edited["filters"][0]["weights"][0] = "x";
    CHECK_ERROR_KIND(checkpoint_from_json(edited.dump()), ErrorKind::Format);

    std::ofstream(path) << "{\"format\": \"something-else\"}";
    CHECK_ERROR_KIND(load_checkpoint(path), ErrorKind::Format);
    std::filesystem::remove(path);
    CHECK_ERROR_KIND(load_checkpoint(path), ErrorKind::Io);
}

TEST_CASE("a trained Lorenz model reloads with identical predictions")
{
    LorenzConfig lc;
    lc.num_points = 400;
    auto traj = lorenz_generate(lc);
    SeriesBundle b;
    b.target = traj.x;
    auto norm = normalize(b, 300);
    std::vector<double> train_x(norm.target.begin(), norm.target.begin() + 300);

    NetworkConfig net;
    TrainConfig cfg;
    cfg.iterations = 300;
    auto report = train(net, cfg, train_x, {}, 5);

    Checkpoint c;
    c.network = net;
    c.params = report.final_params;
    c.meta.norm = norm.norm;
    auto path = temp_path("lorenz.json");
    save_checkpoint(c, path);
    auto back = load_checkpoint(path);
    std::filesystem::remove(path);
    CHECK(forward_unconditional(back.params, back.network, norm.target) ==
          forward_unconditional(report.final_params, net, norm.target));
    CHECK(forecast_n_steps(back.params, back.network, train_x, {}, 20) ==
          forecast_n_steps(report.final_params, net, train_x, {}, 20));
}
