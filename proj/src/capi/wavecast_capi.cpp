#include "wavecast/wavecast.h"

#include "baselines.hpp"
#include "checkpoint.hpp"
#include "datagen.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "trainer.hpp"
#include "wavenet.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

using namespace wavecast;

struct wc_series {
    SeriesBundle bundle;
};

struct wc_model {
    Checkpoint checkpoint;
    std::vector<const char*> condition_ptrs;  // backing for wc_model_get_info
};

struct wc_train_result {
    NetworkConfig net;
    TrainConfig train;
    std::vector<TrainReport> reports;
};

struct wc_metrics {
    std::vector<MetricsRow> rows;
};

namespace {

thread_local std::string last_error;

wc_status status_of(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Config: return WC_ERR_CONFIG;
    case ErrorKind::Usage: return WC_ERR_USAGE;
    case ErrorKind::Numeric: return WC_ERR_NUMERIC;
    case ErrorKind::Data: return WC_ERR_DATA;
    case ErrorKind::Format: return WC_ERR_FORMAT;
    case ErrorKind::Io: return WC_ERR_IO;
    }
    return WC_ERR_INTERNAL;
}

template <typename Fn>
wc_status guarded(Fn&& fn)
{
    try {
        fn();
        last_error.clear();
        return WC_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return WC_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return WC_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what)
{
    if (!p) fail(ErrorKind::Usage, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::vector<std::vector<double>> copy_conditions(const double* const* conds, size_t n_conds, size_t length)
{
    std::vector<std::vector<double>> out;
    if (n_conds > 0) need(conds, "conds");
    for (size_t c = 0; c < n_conds; ++c) {
        need(conds[c], "condition series");
        out.emplace_back(conds[c], conds[c] + length);
    }
    return out;
}

NetworkConfig to_core(const wc_network_config* c)
{
    need(c, "network config");
    if (c->layers == 0 || c->layers > WC_MAX_LAYERS) {
        fail(ErrorKind::Config, "layers must be in 1.." + std::to_string(WC_MAX_LAYERS));
    }
    NetworkConfig out;
    out.layers = c->layers;
    out.taps = c->taps;
    out.channels.assign(c->channels, c->channels + c->layers);
    out.num_conditions = c->num_conditions;
    out.final_activation = c->final_relu ? FinalActivation::Relu : FinalActivation::Linear;
    validate(out);
    return out;
}

wc_network_config from_core(const NetworkConfig& c)
{
    wc_network_config out{};
    out.layers = c.layers;
    out.taps = c.taps;
    for (size_t l = 0; l < c.layers && l < WC_MAX_LAYERS; ++l) {
        out.channels[l] = c.channels[l];
    }
    out.num_conditions = c.num_conditions;
    out.final_relu = c.final_activation == FinalActivation::Relu;
    return out;
}

void from_core(const TrainConfig& t, wc_train_config* c)
{
    c->iterations = t.iterations;
    c->learning_rate = t.learning_rate;
    c->l2_gamma = t.l2_gamma;
    c->adam_beta1 = t.adam_beta1;
    c->adam_beta2 = t.adam_beta2;
    c->adam_eps = t.adam_eps;
    c->num_seeds = t.num_seeds;
    c->seed_pool = t.seed_pool;
    c->discard_ratio = t.discard_ratio;
    c->base_seed = t.base_seed;
    c->jobs = t.jobs;
}

// Base config for merging: the caller's struct without validation, so a file
// may fix a field the struct got wrong.
TrainConfig raw_core(const wc_train_config* c)
{
    TrainConfig t;
    t.iterations = c->iterations;
    t.learning_rate = c->learning_rate;
    t.l2_gamma = c->l2_gamma;
    t.adam_beta1 = c->adam_beta1;
    t.adam_beta2 = c->adam_beta2;
    t.adam_eps = c->adam_eps;
    t.num_seeds = c->num_seeds;
    t.seed_pool = c->seed_pool;
    t.discard_ratio = c->discard_ratio;
    t.base_seed = c->base_seed;
    t.jobs = c->jobs;
    return t;
}

TrainConfig to_core(const wc_train_config* c)
{
    need(c, "train config");
    TrainConfig t = raw_core(c);
    validate(t);
    return t;
}

const SeriesBundle& bundle_of(const wc_series* s)
{
    need(s, "series");
    return s->bundle;
}

void publish(wc_series** out, SeriesBundle b)
{
    need(out, "out");
    *out = new wc_series{std::move(b)};
}

const Checkpoint& checkpoint_of(const wc_model* m)
{
    need(m, "model");
    return m->checkpoint;
}

const Checkpoint& network_of(const wc_model* m)
{
    const Checkpoint& c = checkpoint_of(m);
    require(c.kind == ModelKind::WaveNet, ErrorKind::Usage, "model is not a network");
    return c;
}

const TrainReport& report_of(const wc_train_result* r, size_t index)
{
    need(r, "train result");
    if (index >= r->reports.size()) {
        fail(ErrorKind::Usage, "train result index " + std::to_string(index) + " out of range");
    }
    return r->reports[index];
}

const MetricsReport& report_row(const wc_metrics* m, size_t row)
{
    need(m, "metrics");
    if (row >= m->rows.size()) fail(ErrorKind::Usage, "metrics row out of range");
    return m->rows[row].report;
}

// AR window layout: feature 0 is the target, then the conditions.
std::vector<std::vector<double>> ar_windows(const ARModel& model, const double* x, size_t length,
                                            const double* const* conds, size_t n_conds)
{
    require(n_conds + 1 == model.num_features, ErrorKind::Config,
            "model uses " + std::to_string(model.num_features - 1) + " extra features, got " + std::to_string(n_conds));
    std::vector<std::vector<double>> w;
    w.emplace_back(x, x + length);
    for (auto& c : copy_conditions(conds, n_conds, length)) {
        w.push_back(std::move(c));
    }
    return w;
}

} // namespace

extern "C" {

const char* wc_version(void) { return "0.1.0"; }

const char* wc_status_name(wc_status status)
{
    switch (status) {
    case WC_OK: return "ok";
    case WC_ERR_CONFIG: return "config error";
    case WC_ERR_USAGE: return "usage error";
    case WC_ERR_NUMERIC: return "numeric error";
    case WC_ERR_DATA: return "data error";
    case WC_ERR_FORMAT: return "format error";
    case WC_ERR_IO: return "io error";
    case WC_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* wc_last_error(void) { return last_error.c_str(); }

void wc_string_free(char* s) { std::free(s); }

// ---- series

wc_status wc_series_create(const char* target_name, const double* target, size_t length, const char* const* cond_names,
                           const double* const* conds, size_t n_conds, wc_series** out)
{
    return guarded([&] {
        need(target, "target");
        require(length > 0, ErrorKind::Usage, "series must not be empty");
        SeriesBundle b;
        b.target_name = target_name ? target_name : "target";
        b.target.assign(target, target + length);
        b.conditions = copy_conditions(conds, n_conds, length);
        for (size_t c = 0; c < n_conds; ++c) {
            b.condition_names.push_back(cond_names && cond_names[c] ? cond_names[c] : "cond" + std::to_string(c + 1));
        }
        validate(b);
        publish(out, std::move(b));
    });
}

wc_status wc_series_load_csv(const char* path, const char* target, const char* const* conds, size_t n_conds,
                             const char* timestamp_column, int forward_fill, wc_series** out)
{
    return guarded([&] {
        need(path, "path");
        need(target, "target column");
        CsvColumns cols;
        cols.target = target;
        if (n_conds > 0) need(conds, "condition columns");
        for (size_t c = 0; c < n_conds; ++c) {
            need(conds[c], "condition column");
            cols.conditions.emplace_back(conds[c]);
        }
        if (timestamp_column) cols.timestamp = timestamp_column;
        cols.forward_fill = forward_fill != 0;
        publish(out, load_csv(path, cols));
    });
}

void wc_series_free(wc_series* s) { delete s; }

size_t wc_series_length(const wc_series* s) { return s ? s->bundle.length() : 0; }
size_t wc_series_num_conditions(const wc_series* s) { return s ? s->bundle.conditions.size() : 0; }
const double* wc_series_target(const wc_series* s) { return s ? s->bundle.target.data() : nullptr; }
const char* wc_series_target_name(const wc_series* s) { return s ? s->bundle.target_name.c_str() : nullptr; }

const double* wc_series_condition(const wc_series* s, size_t index)
{
    if (!s || index >= s->bundle.conditions.size()) return nullptr;
    return s->bundle.conditions[index].data();
}

const char* wc_series_condition_name(const wc_series* s, size_t index)
{
    if (!s || index >= s->bundle.condition_names.size()) return nullptr;
    return s->bundle.condition_names[index].c_str();
}

const char* wc_series_timestamp(const wc_series* s, size_t index)
{
    if (!s || index >= s->bundle.timestamps.size()) return nullptr;
    return s->bundle.timestamps[index].c_str();
}

wc_status wc_series_to_returns(const wc_series* prices, wc_series** out)
{
    return guarded([&] { publish(out, to_returns(bundle_of(prices))); });
}

wc_status wc_series_normalize(const wc_series* s, size_t train_begin, size_t train_len, wc_series** out)
{
    return guarded([&] { publish(out, normalize(bundle_of(s), train_begin, train_len)); });
}

wc_status wc_series_norm(const wc_series* s, int* has_norm, double* mu, double* sigma)
{
    return guarded([&] {
        const auto& b = bundle_of(s);
        need(has_norm, "has_norm");
        *has_norm = b.norm.has_value();
        if (mu) *mu = b.norm ? b.norm->mu : 0.0;
        if (sigma) *sigma = b.norm ? b.norm->sigma : 1.0;
    });
}

wc_status wc_series_slice(const wc_series* s, size_t begin, size_t end, wc_series** out)
{
    return guarded([&] { publish(out, slice(bundle_of(s), begin, end)); });
}

// ---- Lorenz

void wc_lorenz_config_default(wc_lorenz_config* config)
{
    if (!config) return;
    const LorenzConfig d;
    *config = {d.sigma, d.rho, d.beta, d.x0, d.y0, d.z0, d.num_points, d.dt, d.substeps, d.as_printed ? 1 : 0};
}

wc_status wc_lorenz_generate(const wc_lorenz_config* config, double* x, double* y, double* z)
{
    return guarded([&] {
        need(config, "config");
        need(x, "x");
        need(y, "y");
        need(z, "z");
        LorenzConfig c;
        c.sigma = config->sigma;
        c.rho = config->rho;
        c.beta = config->beta;
        c.x0 = config->x0;
        c.y0 = config->y0;
        c.z0 = config->z0;
        c.num_points = config->num_points;
        c.dt = config->dt;
        c.substeps = config->substeps;
        c.as_printed = config->as_printed != 0;
        const auto t = lorenz_generate(c);
        std::copy(t.x.begin(), t.x.end(), x);
        std::copy(t.y.begin(), t.y.end(), y);
        std::copy(t.z.begin(), t.z.end(), z);
    });
}

// ---- splits

wc_status wc_make_splits(size_t length, size_t train_len, size_t test_len, wc_split* out, size_t capacity,
                         size_t* count)
{
    return guarded([&] {
        need(count, "count");
        const auto splits = make_splits(length, SplitPlan{train_len, test_len});
        *count = splits.size();
        if (capacity > 0) need(out, "out");
        for (size_t i = 0; i < splits.size() && i < capacity; ++i) {
            out[i] = {splits[i].train_begin, splits[i].train_end, splits[i].test_begin, splits[i].test_end};
        }
    });
}

// ---- network configuration

void wc_network_config_default(wc_network_config* config)
{
    if (config) *config = from_core(NetworkConfig{});
}

wc_status wc_network_receptive_field(const wc_network_config* config, size_t* out)
{
    return guarded([&] {
        need(out, "out");
        *out = receptive_field(to_core(config));
    });
}

wc_status wc_network_history_length(const wc_network_config* config, size_t* out)
{
    return guarded([&] {
        need(out, "out");
        *out = history_length(to_core(config));
    });
}

wc_status wc_network_parameter_count(const wc_network_config* config, size_t* out)
{
    return guarded([&] {
        need(out, "out");
        *out = parameter_count(to_core(config));
    });
}

// ---- train configuration

void wc_train_config_default(wc_train_config* config)
{
    if (config) from_core(TrainConfig{}, config);
}

wc_status wc_train_config_load(const char* path, wc_train_config* config)
{
    return guarded([&] {
        need(path, "path");
        need(config, "config");
        // Keys present in the file override the caller's values.
        std::ifstream in(path, std::ios::binary);
        require(static_cast<bool>(in), ErrorKind::Io, std::string("cannot open train config ") + path);
        std::stringstream buf;
        buf << in.rdbuf();
        from_core(merge_train_config(raw_core(config), buf.str()), config);
    });
}

wc_status wc_train_config_merge_json(const char* json_text, wc_train_config* config)
{
    return guarded([&] {
        need(json_text, "json_text");
        need(config, "config");
        from_core(merge_train_config(raw_core(config), json_text), config);
    });
}

wc_status wc_train_config_to_json(const wc_train_config* config, char** out)
{
    return guarded([&] {
        need(out, "out");
        *out = dup_string(train_config_to_json(to_core(config)));
    });
}

// ---- models

wc_status wc_model_create_wavenet(const wc_network_config* config, uint64_t seed, wc_model** out)
{
    return guarded([&] {
        need(out, "out");
        auto m = std::make_unique<wc_model>();
        m->checkpoint.kind = ModelKind::WaveNet;
        m->checkpoint.network = to_core(config);
        m->checkpoint.params = init_params(m->checkpoint.network, seed);
        m->checkpoint.meta.seed = seed;
        m->checkpoint.meta.condition_names.resize(m->checkpoint.network.num_conditions);
        *out = m.release();
    });
}

wc_status wc_model_fit_ar(const double* const* features, size_t n_features, size_t length, size_t order, wc_model** out)
{
    return guarded([&] {
        need(out, "out");
        need(features, "features");
        require(n_features > 0, ErrorKind::Usage, "at least one feature is required");
        std::vector<std::vector<double>> f;
        for (size_t i = 0; i < n_features; ++i) {
            need(features[i], "feature series");
            f.emplace_back(features[i], features[i] + length);
        }
        auto m = std::make_unique<wc_model>();
        m->checkpoint.kind = ModelKind::AutoRegressive;
        m->checkpoint.ar = fit_ar(f, order);
        m->checkpoint.meta.condition_names.resize(n_features - 1);
        *out = m.release();
    });
}

wc_status wc_model_load(const char* path, wc_model** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        auto m = std::make_unique<wc_model>();
        m->checkpoint = load_checkpoint(path);
        *out = m.release();
    });
}

wc_status wc_model_save(const wc_model* model, const char* path)
{
    return guarded([&] {
        need(path, "path");
        save_checkpoint(checkpoint_of(model), path);
    });
}

void wc_model_free(wc_model* model) { delete model; }

wc_model_kind wc_model_get_kind(const wc_model* model)
{
    return model && model->checkpoint.kind == ModelKind::AutoRegressive ? WC_MODEL_AR : WC_MODEL_WAVENET;
}

wc_status wc_model_get_info(const wc_model* model, wc_model_info* info)
{
    return guarded([&] {
        need(info, "info");
        const auto& meta = checkpoint_of(model).meta;
        auto& ptrs = const_cast<wc_model*>(model)->condition_ptrs;
        ptrs.clear();
        for (const auto& name : meta.condition_names) {
            ptrs.push_back(name.c_str());
        }
        info->target_name = meta.target_name.c_str();
        info->condition_names = ptrs.data();
        info->num_condition_names = ptrs.size();
        info->has_norm = meta.norm.has_value();
        info->norm_mu = meta.norm ? meta.norm->mu : 0.0;
        info->norm_sigma = meta.norm ? meta.norm->sigma : 1.0;
        info->seed = meta.seed;
        info->train_mae = meta.train_mae;
        info->train_begin = meta.train_begin;
        info->train_end = meta.train_end;
    });
}

wc_status wc_model_set_info(wc_model* model, const wc_model_info* info)
{
    return guarded([&] {
        need(model, "model");
        need(info, "info");
        CheckpointMeta meta;
        meta.target_name = info->target_name ? info->target_name : "";
        if (info->num_condition_names > 0) need(info->condition_names, "condition_names");
        for (size_t i = 0; i < info->num_condition_names; ++i) {
            meta.condition_names.emplace_back(info->condition_names[i] ? info->condition_names[i] : "");
        }
        if (info->has_norm) {
            require(info->norm_sigma > 0.0, ErrorKind::Usage, "normalization sigma must be positive");
            meta.norm = NormStats{info->norm_mu, info->norm_sigma};
        }
        meta.seed = info->seed;
        meta.train_mae = info->train_mae;
        meta.train_begin = info->train_begin;
        meta.train_end = info->train_end;
        if (meta.condition_names.size() != wc_model_num_conditions(model)) {
            fail(ErrorKind::Config, "model uses " + std::to_string(wc_model_num_conditions(model)) +
                                        " conditions, info names " + std::to_string(meta.condition_names.size()));
        }
        model->checkpoint.meta = std::move(meta);
        model->condition_ptrs.clear();
    });
}

wc_status wc_model_network_config(const wc_model* model, wc_network_config* out)
{
    return guarded([&] {
        need(out, "out");
        *out = from_core(network_of(model).network);
    });
}

wc_status wc_model_check_network(const wc_model* model, const wc_network_config* expected)
{
    return guarded([&] { require_network(checkpoint_of(model), to_core(expected)); });
}

wc_status wc_model_history_length(const wc_model* model, size_t* out)
{
    return guarded([&] {
        need(out, "out");
        const auto& c = checkpoint_of(model);
        *out = c.kind == ModelKind::WaveNet ? history_length(c.network) : c.ar.order;
    });
}

size_t wc_model_num_conditions(const wc_model* model)
{
    if (!model) return 0;
    const auto& c = model->checkpoint;
    return c.kind == ModelKind::WaveNet ? c.network.num_conditions : c.ar.num_features - 1;
}

wc_status wc_model_zero_weights(wc_model* model)
{
    return guarded([&] {
        network_of(model);
        for_each_filter(model->checkpoint.params, [](const std::string&, ParamKey, ConvFilter& f) {
            std::fill(f.weights.begin(), f.weights.end(), 0.0);
            std::fill(f.bias.begin(), f.bias.end(), 0.0);
        });
    });
}

wc_status wc_model_ar_coefficient(const wc_model* model, size_t feature, size_t lag, size_t source, double* out)
{
    return guarded([&] {
        need(out, "out");
        const auto& c = checkpoint_of(model);
        require(c.kind == ModelKind::AutoRegressive, ErrorKind::Usage, "model is not autoregressive");
        require(feature < c.ar.num_features && source < c.ar.num_features && lag >= 1 && lag <= c.ar.order,
                ErrorKind::Usage, "coefficient index out of range");
        *out = c.ar.coefficient(feature, lag, source);
    });
}

wc_status wc_model_ar_intercept(const wc_model* model, size_t feature, double* out)
{
    return guarded([&] {
        need(out, "out");
        const auto& c = checkpoint_of(model);
        require(c.kind == ModelKind::AutoRegressive, ErrorKind::Usage, "model is not autoregressive");
        require(feature < c.ar.num_features, ErrorKind::Usage, "feature index out of range");
        *out = c.ar.intercept(feature);
    });
}

wc_status wc_model_forward(const wc_model* model, const double* x, size_t length, const double* const* conds,
                           size_t n_conds, double* out)
{
    return guarded([&] {
        const auto& c = network_of(model);
        need(x, "x");
        need(out, "out");
        const auto cs = copy_conditions(conds, n_conds, length);
        const auto pred = forward_conditional(c.params, c.network, std::span<const double>(x, length), cs);
        std::copy(pred.begin(), pred.end(), out);
    });
}

wc_status wc_model_predict_next(const wc_model* model, const double* x, size_t length, const double* const* conds,
                                size_t n_conds, double* out)
{
    return guarded([&] {
        const auto& c = checkpoint_of(model);
        need(x, "x");
        need(out, "out");
        if (c.kind == ModelKind::WaveNet) {
            const auto cs = copy_conditions(conds, n_conds, length);
            *out = predict_next(c.params, c.network, std::span<const double>(x, length), cs);
        } else {
            *out = predict_ar(c.ar, ar_windows(c.ar, x, length, conds, n_conds));
        }
    });
}

wc_status wc_model_forecast(const wc_model* model, const double* x, size_t length, const double* const* conds,
                            size_t n_conds, size_t steps, double* out)
{
    return guarded([&] {
        const auto& c = checkpoint_of(model);
        need(x, "x");
        need(out, "out");
        std::vector<double> f;
        if (c.kind == ModelKind::WaveNet) {
            const auto cs = copy_conditions(conds, n_conds, length);
            f = forecast_n_steps(c.params, c.network, std::span<const double>(x, length), cs, steps);
        } else {
            f = forecast_ar(c.ar, ar_windows(c.ar, x, length, conds, n_conds), steps);
        }
        std::copy(f.begin(), f.end(), out);
    });
}

// ---- training

wc_status wc_train_ensemble(const wc_network_config* net, const wc_train_config* train, const double* x, size_t length,
                            const double* const* conds, size_t n_conds, wc_train_result** out)
{
    return guarded([&] {
        need(out, "out");
        need(x, "x");
        auto r = std::make_unique<wc_train_result>();
        r->net = to_core(net);
        r->train = to_core(train);
        const auto cs = copy_conditions(conds, n_conds, length);
        r->reports = train_ensemble(r->net, r->train, std::span<const double>(x, length), cs);
        *out = r.release();
    });
}

wc_status wc_train_single(const wc_network_config* net, const wc_train_config* train, const double* x, size_t length,
                          const double* const* conds, size_t n_conds, uint64_t seed, wc_train_result** out)
{
    return guarded([&] {
        need(out, "out");
        need(x, "x");
        auto r = std::make_unique<wc_train_result>();
        r->net = to_core(net);
        r->train = to_core(train);
        const auto cs = copy_conditions(conds, n_conds, length);
        r->reports.push_back(wavecast::train(r->net, r->train, std::span<const double>(x, length), cs, seed));
        *out = r.release();
    });
}

void wc_train_result_free(wc_train_result* result) { delete result; }

size_t wc_train_result_count(const wc_train_result* result) { return result ? result->reports.size() : 0; }

uint64_t wc_train_result_seed(const wc_train_result* result, size_t index)
{
    return result && index < result->reports.size() ? result->reports[index].seed : 0;
}

double wc_train_result_train_mae(const wc_train_result* result, size_t index)
{
    return result && index < result->reports.size() ? result->reports[index].train_mae : 0.0;
}

double wc_train_result_initial_mae(const wc_train_result* result, size_t index)
{
    return result && index < result->reports.size() ? result->reports[index].initial_mae : 0.0;
}

int wc_train_result_diverged(const wc_train_result* result, size_t index)
{
    return result && index < result->reports.size() && result->reports[index].diverged;
}

const double* wc_train_result_loss_trace(const wc_train_result* result, size_t index, size_t* length)
{
    if (!result || index >= result->reports.size()) {
        if (length) *length = 0;
        return nullptr;
    }
    const auto& trace = result->reports[index].loss_trace;
    if (length) *length = trace.size();
    return trace.data();
}

wc_status wc_train_result_trace_csv(const wc_train_result* result, size_t index, char** out)
{
    return guarded([&] {
        need(out, "out");
        *out = dup_string(loss_trace_csv(report_of(result, index)));
    });
}

wc_status wc_train_result_model(const wc_train_result* result, size_t index, wc_model** out)
{
    return guarded([&] {
        need(out, "out");
        const auto& rep = report_of(result, index);
        auto m = std::make_unique<wc_model>();
        m->checkpoint.kind = ModelKind::WaveNet;
        m->checkpoint.network = result->net;
        m->checkpoint.params = rep.final_params;
        m->checkpoint.meta.seed = rep.seed;
        m->checkpoint.meta.train_mae = rep.train_mae;
        m->checkpoint.meta.condition_names.resize(result->net.num_conditions);
        *out = m.release();
    });
}

// ---- metrics

wc_status wc_rmse(const double* forecasts, const double* actuals, size_t n, double* out)
{
    return guarded([&] {
        need(out, "out");
        need(forecasts, "forecasts");
        need(actuals, "actuals");
        *out = rmse({forecasts, n}, {actuals, n});
    });
}

wc_status wc_mase(const double* forecasts, const double* actuals, const double* naive, size_t n, double* out)
{
    return guarded([&] {
        need(out, "out");
        need(forecasts, "forecasts");
        need(actuals, "actuals");
        need(naive, "naive");
        *out = mase({forecasts, n}, {actuals, n}, {naive, n});
    });
}

wc_status wc_hits(const double* forecasts, const double* actuals, size_t n, double* out)
{
    return guarded([&] {
        need(out, "out");
        need(forecasts, "forecasts");
        need(actuals, "actuals");
        *out = hits({forecasts, n}, {actuals, n});
    });
}

wc_status wc_summarize(const double* values, size_t n, double* mean, double* std)
{
    return guarded([&] {
        need(values, "values");
        const auto s = summarize({values, n});
        if (mean) *mean = s.mean;
        if (std) *std = s.std;
    });
}

wc_status wc_metrics_create(wc_metrics** out)
{
    return guarded([&] {
        need(out, "out");
        *out = new wc_metrics{};
    });
}

void wc_metrics_free(wc_metrics* metrics) { delete metrics; }

wc_status wc_metrics_add_row(wc_metrics* metrics, const char* label, const double* rmse_v, const double* mase_v,
                             const double* hits_v, size_t n_seeds, size_t n_points)
{
    return guarded([&] {
        need(metrics, "metrics");
        need(label, "label");
        need(rmse_v, "rmse");
        need(mase_v, "mase");
        need(hits_v, "hits");
        require(n_seeds > 0, ErrorKind::Usage, "a metrics row needs at least one seed");
        std::vector<SeedMetrics> seeds;
        for (size_t i = 0; i < n_seeds; ++i) {
            seeds.push_back({rmse_v[i], mase_v[i], hits_v[i]});
        }
        metrics->rows.push_back({label, aggregate(seeds, n_points)});
    });
}

size_t wc_metrics_row_count(const wc_metrics* metrics) { return metrics ? metrics->rows.size() : 0; }

wc_status wc_metrics_row_mean(const wc_metrics* metrics, size_t row, const char* metric, double* mean, double* std)
{
    return guarded([&] {
        need(metric, "metric");
        const auto& r = report_row(metrics, row);
        const MetricSummary* s = nullptr;
        const std::string name = metric;
        if (name == "rmse") s = &r.rmse;
        if (name == "mase") s = &r.mase;
        if (name == "hits") s = &r.hits;
        if (!s) fail(ErrorKind::Usage, "unknown metric '" + name + "'");
        if (mean) *mean = s->mean;
        if (std) *std = s->std;
    });
}

wc_status wc_metrics_csv(const wc_metrics* metrics, char** out)
{
    return guarded([&] {
        need(metrics, "metrics");
        need(out, "out");
        *out = dup_string(metrics_csv(metrics->rows));
    });
}

wc_status wc_metrics_table(const wc_metrics* metrics, const char* title, const char* scale, char** out)
{
    return guarded([&] {
        need(metrics, "metrics");
        need(out, "out");
        *out = dup_string(metrics_table(metrics->rows, title ? title : "", scale ? scale : ""));
    });
}

wc_status wc_format_double(double value, char* buffer, size_t capacity)
{
    return guarded([&] {
        need(buffer, "buffer");
        const std::string s = format_double(value);
        require(s.size() < capacity, ErrorKind::Usage, "buffer too small");
        std::memcpy(buffer, s.c_str(), s.size() + 1);
    });
}

} // extern "C"
