#include "trainer.hpp"

#include "error.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace wavecast {

using nlohmann::json;

void validate(const TrainConfig& c)
{
    require(c.iterations >= 1, ErrorKind::Config, "iterations must be at least 1");
    require(c.learning_rate > 0.0, ErrorKind::Config, "learning rate must be positive");
    require(c.l2_gamma >= 0.0, ErrorKind::Config, "l2_gamma must be nonnegative");
    require(c.adam_beta1 >= 0.0 && c.adam_beta1 < 1.0, ErrorKind::Config, "adam_beta1 must lie in [0, 1)");
    require(c.adam_beta2 >= 0.0 && c.adam_beta2 < 1.0, ErrorKind::Config, "adam_beta2 must lie in [0, 1)");
    require(c.adam_eps > 0.0, ErrorKind::Config, "adam_eps must be positive");
    require(c.num_seeds >= 1, ErrorKind::Config, "num_seeds must be at least 1");
    require(c.seed_pool >= c.num_seeds, ErrorKind::Config, "seed_pool must be at least num_seeds");
    require(c.discard_ratio >= 1.0, ErrorKind::Config, "discard_ratio must be at least 1");
    require(c.jobs >= 1, ErrorKind::Config, "jobs must be at least 1");
}

namespace {

template <typename T>
void read_field(const json& obj, const char* name, T& out)
{
    auto it = obj.find(name);
    if (it == obj.end()) {
        return;
    }
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        fail(ErrorKind::Format, std::string("train config field '") + name + "' has the wrong type");
    }
}

} // namespace

TrainConfig merge_train_config(TrainConfig c, const std::string& json_text)
{
    json obj;
    try {
        obj = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(ErrorKind::Format, std::string("train config is not valid JSON: ") + e.what());
    }
    require(obj.is_object(), ErrorKind::Format, "train config must be a JSON object");
    static const char* known[] = {"iterations",     "learning_rate", "l2_gamma",      "adam_beta1",
                                  "adam_beta2",     "adam_eps",      "num_seeds",     "seed_pool",
                                  "discard_ratio",  "base_seed",     "jobs"};
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return it.key() == k; }) ==
            std::end(known)) {
            fail(ErrorKind::Format, "unknown train config field '" + it.key() + "'");
        }
    }
    read_field(obj, "iterations", c.iterations);
    read_field(obj, "learning_rate", c.learning_rate);
    read_field(obj, "l2_gamma", c.l2_gamma);
    read_field(obj, "adam_beta1", c.adam_beta1);
    read_field(obj, "adam_beta2", c.adam_beta2);
    read_field(obj, "adam_eps", c.adam_eps);
    read_field(obj, "num_seeds", c.num_seeds);
    read_field(obj, "seed_pool", c.seed_pool);
    read_field(obj, "discard_ratio", c.discard_ratio);
    read_field(obj, "base_seed", c.base_seed);
    read_field(obj, "jobs", c.jobs);
    validate(c);
    return c;
}

TrainConfig load_train_config(const std::string& path)
{
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::Io, "cannot open train config " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return merge_train_config(TrainConfig{}, buf.str());
}

std::string train_config_to_json(const TrainConfig& c)
{
    json obj = {{"iterations", c.iterations}, {"learning_rate", c.learning_rate}, {"l2_gamma", c.l2_gamma},
                {"adam_beta1", c.adam_beta1}, {"adam_beta2", c.adam_beta2},       {"adam_eps", c.adam_eps},
                {"num_seeds", c.num_seeds},   {"seed_pool", c.seed_pool},         {"discard_ratio", c.discard_ratio},
                {"base_seed", c.base_seed},   {"jobs", c.jobs}};
    return obj.dump(2);
}

double objective(std::span<const double> predictions, std::span<const double> targets, double gamma,
                 double weight_sq_sum)
{
    require(!targets.empty(), ErrorKind::Usage, "objective needs at least one target");
    require(predictions.size() == targets.size(), ErrorKind::Usage, "predictions and targets differ in length");
    double total = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        total += std::abs(predictions[i] - targets[i]);
    }
    return total / static_cast<double>(targets.size()) + 0.5 * gamma * weight_sq_sum;
}

double objective(const NetworkParams& params, std::span<const double> predictions, std::span<const double> targets,
                 double gamma)
{
    return objective(predictions, targets, gamma, squared_weight_sum(params));
}

AdamState AdamState::zeros_like(const NetworkParams& params)
{
    AdamState s;
    for_each_filter(params, [&](const std::string&, ParamKey, const ConvFilter& f) {
        s.first.emplace_back(f.weights.size() + f.bias.size(), 0.0);
        s.second.emplace_back(f.weights.size() + f.bias.size(), 0.0);
    });
    return s;
}

void adam_step(NetworkParams& params, const Gradients& grads, AdamState& state, const TrainConfig& config,
               std::size_t iteration)
{
    require(iteration >= 1, ErrorKind::Usage, "Adam iterations are 1-based");

    for_each_filter(params, [&](const std::string& name, ParamKey key, ConvFilter& f) {
        require(key < state.first.size() && state.first[key].size() == f.weights.size() + f.bias.size(),
                ErrorKind::Config, "Adam state does not match parameter " + name);
        if (!grads.contains(key)) {
            return;
        }
        const ConvFilter& g = grads.at(key);
        for (std::size_t i = 0; i < g.weights.size(); ++i) {
            if (!std::isfinite(g.weights[i])) {
                fail(ErrorKind::Numeric, "non-finite gradient for " + name + ".weights[" + std::to_string(i) + "]");
            }
        }
        for (std::size_t i = 0; i < g.bias.size(); ++i) {
            if (!std::isfinite(g.bias[i])) {
                fail(ErrorKind::Numeric, "non-finite gradient for " + name + ".bias[" + std::to_string(i) + "]");
            }
        }
    });

    const double b1 = config.adam_beta1;
    const double b2 = config.adam_beta2;
    const double t = static_cast<double>(iteration);
    const double correction1 = 1.0 - std::pow(b1, t);
    const double correction2 = 1.0 - std::pow(b2, t);
    const double lr = config.learning_rate;
    const double eps = config.adam_eps;

    for_each_filter(params, [&](const std::string&, ParamKey key, ConvFilter& f) {
        if (!grads.contains(key)) {
            return;
        }
        const ConvFilter& g = grads.at(key);
        auto& m = state.first[key];
        auto& v = state.second[key];
        auto update = [&](double& p, double grad, std::size_t slot) {
            m[slot] = b1 * m[slot] + (1.0 - b1) * grad;
            v[slot] = b2 * v[slot] + (1.0 - b2) * grad * grad;
            const double m_hat = m[slot] / correction1;
            const double v_hat = v[slot] / correction2;
            p -= lr * m_hat / (std::sqrt(v_hat) + eps);
        };
        for (std::size_t i = 0; i < f.weights.size(); ++i) {
            update(f.weights[i], g.weights[i], i);
        }
        for (std::size_t i = 0; i < f.bias.size(); ++i) {
            update(f.bias[i], g.bias[i], f.weights.size() + i);
        }
    });
}

Evaluation evaluate_objective(const NetworkParams& params, const NetworkConfig& net, std::span<const double> x,
                              std::span<const std::vector<double>> conditions, double gamma)
{
    require(x.size() >= 2, ErrorKind::Usage, "training needs at least two observations");
    GradientTape tape;
    auto pred = record_forward(tape, params, net, x, conditions);
    // Output i predicts x(i); output 0 sees only padding and output N lies past the data.
    auto mae = tape.mean_abs_error(pred, x.subspan(1), 1);
    auto loss = mae;
    if (gamma > 0.0) {
        std::vector<GradientTape::Var> squares;
        for_each_filter(params, [&](const std::string&, ParamKey key, const ConvFilter& f) {
            squares.push_back(tape.squared_weights(f, key));
        });
        auto penalty = squares.front();
        for (std::size_t i = 1; i < squares.size(); ++i) {
            penalty = tape.add(penalty, squares[i]);
        }
        loss = tape.add(mae, tape.scale(penalty, 0.5 * gamma));
    }
    Evaluation e;
    e.objective = tape.scalar(loss);
    e.mae = tape.scalar(mae);
    e.gradients = tape.backward(loss);
    return e;
}

double train_mae(const NetworkParams& params, const NetworkConfig& net, std::span<const double> x,
                 std::span<const std::vector<double>> conditions)
{
    require(x.size() >= 2, ErrorKind::Usage, "training MAE needs at least two observations");
    const auto pred = forward_conditional(params, net, x, conditions);
    double total = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        total += std::abs(pred[i] - x[i]);
    }
    return total / static_cast<double>(x.size() - 1);
}

TrainReport train(const NetworkConfig& net, const TrainConfig& config, std::span<const double> x,
                  std::span<const std::vector<double>> conditions, std::uint64_t seed)
{
    return train_from(net, config, x, conditions, init_params(net, seed), seed);
}

TrainReport train_from(const NetworkConfig& net, const TrainConfig& config, std::span<const double> x,
                       std::span<const std::vector<double>> conditions, NetworkParams initial, std::uint64_t seed)
{
    validate(net);
    validate(config);
    if (x.size() <= history_length(net)) {
        fail(ErrorKind::Usage, "training series of length " + std::to_string(x.size()) +
                                   " does not exceed the receptive field " + std::to_string(history_length(net)));
    }

    TrainReport report;
    report.seed = seed;
    check_compatible(initial, net);
    report.final_params = std::move(initial);
    report.loss_trace.reserve(config.iterations);
    report.initial_mae = train_mae(report.final_params, net, x, conditions);

    NetworkParams params = report.final_params;
    AdamState state = AdamState::zeros_like(params);
    for (std::size_t it = 1; it <= config.iterations; ++it) {
        try {
            Evaluation e = evaluate_objective(params, net, x, conditions, config.l2_gamma);
            if (!std::isfinite(e.objective)) {
                fail(ErrorKind::Numeric, "non-finite objective");
            }
            report.loss_trace.push_back(e.objective);
            NetworkParams next = params;
            adam_step(next, e.gradients, state, config, it);
            bool finite = true;
            for_each_filter(next, [&](const std::string&, ParamKey, const ConvFilter& f) {
                for (double w : f.weights) finite = finite && std::isfinite(w);
                for (double b : f.bias) finite = finite && std::isfinite(b);
            });
            if (!finite) {
                fail(ErrorKind::Numeric, "parameters became non-finite");
            }
            report.final_params = params;
            params = std::move(next);
        } catch (const Error& err) {
            if (err.kind() != ErrorKind::Numeric) {
                throw;
            }
            report.diverged = true;
            report.failure = "iteration " + std::to_string(it) + ": " + err.what();
            report.train_mae = std::numeric_limits<double>::infinity();
            return report;
        }
    }
    report.final_params = std::move(params);
    try {
        report.train_mae = train_mae(report.final_params, net, x, conditions);
    } catch (const Error& err) {
        if (err.kind() != ErrorKind::Numeric) {
            throw;
        }
        report.diverged = true;
        report.failure = std::string("final evaluation: ") + err.what();
        report.train_mae = std::numeric_limits<double>::infinity();
    }
    return report;
}

std::uint64_t member_seed(std::uint64_t base_seed, std::size_t index)
{
    // splitmix64 finaliser over (base, index)
    std::uint64_t z = base_seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::vector<TrainReport> select_networks(std::vector<TrainReport> pool, std::size_t keep, double discard_ratio)
{
    require(keep >= 1, ErrorKind::Usage, "must keep at least one network");
    std::erase_if(pool, [](const TrainReport& r) { return r.diverged || !std::isfinite(r.train_mae); });
    if (pool.empty()) {
        fail(ErrorKind::Numeric, "every network in the seed pool diverged");
    }
    std::stable_sort(pool.begin(), pool.end(),
                     [](const TrainReport& a, const TrainReport& b) { return a.train_mae < b.train_mae; });
    const std::size_t n = pool.size();
    const double median =
        n % 2 == 1 ? pool[n / 2].train_mae : 0.5 * (pool[n / 2 - 1].train_mae + pool[n / 2].train_mae);
    std::erase_if(pool, [&](const TrainReport& r) { return r.train_mae > discard_ratio * median; });
    if (pool.size() > keep) {
        pool.resize(keep);
    }
    return pool;
}

std::vector<TrainReport> train_ensemble(const NetworkConfig& net, const TrainConfig& config, std::span<const double> x,
                                        std::span<const std::vector<double>> conditions)
{
    validate(config);
    std::vector<TrainReport> pool(config.seed_pool);
    std::vector<std::exception_ptr> errors(config.seed_pool);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < config.seed_pool; i = next++) {
            try {
                pool[i] = train(net, config, x, conditions, member_seed(config.base_seed, i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::min(config.jobs, config.seed_pool);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (std::size_t w = 0; w < workers; ++w) {
            threads.emplace_back(worker);
        }
        for (auto& t : threads) {
            t.join();
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return select_networks(std::move(pool), config.num_seeds, config.discard_ratio);
}

std::string loss_trace_csv(const TrainReport& report)
{
    std::string out = "iteration,objective\n";
    char buf[64];
    for (std::size_t i = 0; i < report.loss_trace.size(); ++i) {
        out += std::to_string(i + 1);
        out += ',';
        auto res = std::to_chars(buf, buf + sizeof buf, report.loss_trace[i]);
        out.append(buf, res.ptr);
        out += '\n';
    }
    return out;
}

} // namespace wavecast
