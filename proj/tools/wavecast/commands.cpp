#include "commands.hpp"

#include "experiment.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

namespace cli {

namespace {

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) data_error("cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) data_error("failed writing " + path.string());
}

void make_layout(const std::string& out)
{
    std::error_code ec;
    for (const char* sub : {"checkpoints", "traces", "metrics", "forecasts"}) {
        fs::create_directories(fs::path(out) / sub, ec);
        if (ec) data_error("cannot create " + (fs::path(out) / sub).string() + ": " + ec.message());
    }
}

/// The series a split's models see: standardized with that split's training
/// window unless --no-normalize.
struct View {
    Series series;
    bool normalized = false;
    double mu = 0.0;
    double sigma = 1.0;

    const double* target() const { return wc_series_target(series.get()); }
    std::vector<const double*> conds() const
    {
        std::vector<const double*> out;
        for (std::size_t c = 0; c < wc_series_num_conditions(series.get()); ++c) {
            out.push_back(wc_series_condition(series.get(), c));
        }
        return out;
    }
    double to_original(double v) const { return normalized ? v * sigma + mu : v; }
};

View view_for(const Experiment& exp, const wc_series* raw, const wc_split& split)
{
    View v;
    wc_series* s = nullptr;
    if (exp.no_normalize) {
        check(wc_series_slice(raw, 0, wc_series_length(raw), &s), "copy series");
    } else {
        check(wc_series_normalize(raw, split.train_begin, split.train_end - split.train_begin, &s), "normalize");
    }
    v.series.reset(s);
    int has = 0;
    check(wc_series_norm(v.series.get(), &has, &v.mu, &v.sigma), "normalize");
    v.normalized = has != 0;
    return v;
}

std::string split_name(std::size_t s) { return "split" + std::to_string(s); }

fs::path network_checkpoint(const Experiment& exp, std::size_t split, std::size_t rank)
{
    return fs::path(exp.out) / "checkpoints" / (split_name(split) + "_net" + std::to_string(rank) + ".json");
}

fs::path ar_checkpoint(const Experiment& exp, std::size_t split)
{
    return fs::path(exp.out) / "checkpoints" / (split_name(split) + "_" + exp.model + ".json");
}

void describe(wc_model* m, const wc_series* s, const View& v, const wc_split& split, uint64_t seed, double train_mae)
{
    std::vector<const char*> names;
    for (std::size_t c = 0; c < wc_series_num_conditions(s); ++c) {
        names.push_back(wc_series_condition_name(s, c));
    }
    wc_model_info info{};
    info.target_name = wc_series_target_name(s);
    info.condition_names = names.data();
    info.num_condition_names = names.size();
    info.has_norm = v.normalized;
    info.norm_mu = v.mu;
    info.norm_sigma = v.sigma;
    info.seed = seed;
    info.train_mae = train_mae;
    info.train_begin = split.train_begin;
    info.train_end = split.train_end;
    check(wc_model_set_info(m, &info), "model info");
}

/// Loads a split's models and checks they belong to this data and config.
std::vector<Model> load_models(const Experiment& exp, const wc_series* raw, const View& v, const wc_split& split,
                               std::size_t s)
{
    std::vector<Model> models;
    if (exp.model == "naive") {
        return models;
    }
    std::vector<fs::path> paths;
    if (exp.is_network()) {
        for (std::size_t k = 1; fs::exists(network_checkpoint(exp, s, k)); ++k) {
            paths.push_back(network_checkpoint(exp, s, k));
        }
    } else if (fs::exists(ar_checkpoint(exp, s))) {
        paths.push_back(ar_checkpoint(exp, s));
    }
    if (paths.empty()) {
        data_error("no " + exp.model + " checkpoints for " + split_name(s) + " under " +
                   (fs::path(exp.out) / "checkpoints").string() + "; run train first");
    }
    const wc_network_config net = network_config(exp);
    for (const auto& p : paths) {
        wc_model* raw_model = nullptr;
        check(wc_model_load(p.string().c_str(), &raw_model), p.string());
        Model m(raw_model);
        const bool is_net = wc_model_get_kind(m.get()) == WC_MODEL_WAVENET;
        if (is_net != exp.is_network()) {
            data_error(p.string() + " holds a different model kind than --model " + exp.model);
        }
        if (is_net) {
            check(wc_model_check_network(m.get(), &net), p.string());
        }
        wc_model_info info{};
        check(wc_model_get_info(m.get(), &info), p.string());
        std::string mismatch;
        if (std::string(info.target_name) != wc_series_target_name(raw)) {
            mismatch = "target '" + std::string(info.target_name) + "' vs '" + wc_series_target_name(raw) + "'";
        } else if (info.num_condition_names != wc_series_num_conditions(raw)) {
            mismatch = std::to_string(info.num_condition_names) + " conditions vs " +
                       std::to_string(wc_series_num_conditions(raw));
        } else if (info.train_begin != split.train_begin || info.train_end != split.train_end) {
            mismatch = "training rows [" + std::to_string(info.train_begin) + ", " + std::to_string(info.train_end) +
                       ") vs [" + std::to_string(split.train_begin) + ", " + std::to_string(split.train_end) + ")";
        } else if (info.has_norm != static_cast<int>(v.normalized) ||
                   (v.normalized && (info.norm_mu != v.mu || info.norm_sigma != v.sigma))) {
            mismatch = "normalization statistics differ";
        }
        for (std::size_t c = 0; mismatch.empty() && c < info.num_condition_names; ++c) {
            if (std::string(info.condition_names[c]) != wc_series_condition_name(raw, c)) {
                mismatch = "condition '" + std::string(info.condition_names[c]) + "' vs '" +
                           wc_series_condition_name(raw, c) + "'";
            }
        }
        if (!mismatch.empty()) {
            data_error(p.string() + " was trained on other data: " + mismatch);
        }
        models.push_back(std::move(m));
    }
    return models;
}

/// One-step forecasts of rows [test_begin, test_end) on the model scale.
std::vector<double> one_step(const Experiment& exp, const wc_model* m, const View& v, const wc_split& split)
{
    const double* x = v.target();
    const auto conds = v.conds();
    std::vector<double> out;
    if (exp.model == "naive") {
        for (std::size_t t = split.test_begin; t < split.test_end; ++t) {
            out.push_back(x[t - 1]);
        }
    } else if (exp.is_network()) {
        std::vector<double> all(split.test_end + 1);
        check(wc_model_forward(m, x, split.test_end, conds.data(), conds.size(), all.data()), "forward");
        out.assign(all.begin() + static_cast<std::ptrdiff_t>(split.test_begin),
                   all.begin() + static_cast<std::ptrdiff_t>(split.test_end));
    } else {
        for (std::size_t t = split.test_begin; t < split.test_end; ++t) {
            double p = 0.0;
            check(wc_model_predict_next(m, x, t, conds.data(), conds.size(), &p), "predict");
            out.push_back(p);
        }
    }
    return out;
}

struct ScaledSeries {
    std::vector<double> actual;
    std::vector<double> naive;
};

/// Actuals and naive forecasts of a test window on the metric scale.
ScaledSeries scaled_actuals(const wc_series* raw, const View& v, const wc_split& split, bool original)
{
    const double* src = original ? wc_series_target(raw) : v.target();
    ScaledSeries s;
    for (std::size_t t = split.test_begin; t < split.test_end; ++t) {
        s.actual.push_back(src[t]);
        s.naive.push_back(src[t - 1]);
    }
    return s;
}

void to_scale(std::vector<double>& values, const View& v, bool original)
{
    if (!original) return;
    for (double& x : values) {
        x = v.to_original(x);
    }
}

std::string csv_cell(const char* s)
{
    if (!s) return "";
    const std::string text = s;
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string scale_text(const Experiment& exp, bool original)
{
    if (original) {
        return exp.returns ? "returns (not normalized)" : "original series values";
    }
    return exp.no_normalize ? "model input values (not normalized)" : "normalized with training-window statistics";
}

} // namespace

int cmd_generate_lorenz(const wc_lorenz_config& config, const std::string& out_path)
{
    const std::size_t n = config.num_points;
    std::vector<double> x(n), y(n), z(n);
    check(wc_lorenz_generate(&config, x.data(), y.data(), z.data()), "lorenz");
    std::string text = "X,Y,Z\n";
    for (std::size_t i = 0; i < n; ++i) {
        text += fmt(x[i]) + ',' + fmt(y[i]) + ',' + fmt(z[i]) + '\n';
    }
    const fs::path path(out_path);
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) data_error("cannot create " + path.parent_path().string() + ": " + ec.message());
    }
    write_file(path, text);
    std::cout << "wrote " << n << " rows to " << out_path << "\n";
    return exit_ok;
}

int cmd_train(const Experiment& exp)
{
    validate_experiment(exp, Command::Train);
    const Series raw = load_series(exp);
    const auto splits = splits_for(exp, wc_series_length(raw.get()));
    const wc_network_config net = network_config(exp);

    make_layout(exp.out);
    write_file(fs::path(exp.out) / "config.toml", echo_config(exp));

    std::string summary = "split,rank,seed,initial_mae,train_mae,iterations\n";
    for (std::size_t s = 0; s < splits.size(); ++s) {
        const wc_split& split = splits[s];
        const View v = view_for(exp, raw.get(), split);
        const std::size_t len = split.train_end - split.train_begin;
        const double* x = v.target() + split.train_begin;
        std::vector<const double*> conds = v.conds();
        for (auto& c : conds) {
            c += split.train_begin;
        }

        if (exp.is_network()) {
            wc_train_result* r = nullptr;
            check(wc_train_ensemble(&net, &exp.train, x, len, conds.data(), conds.size(), &r), split_name(s));
            const TrainResult result(r);
            for (std::size_t k = 0; k < wc_train_result_count(r); ++k) {
                wc_model* m = nullptr;
                check(wc_train_result_model(r, k, &m), "trained model");
                const Model model(m);
                describe(m, raw.get(), v, split, wc_train_result_seed(r, k), wc_train_result_train_mae(r, k));
                check(wc_model_save(m, network_checkpoint(exp, s, k + 1).string().c_str()), "save");
                const std::string trace = take([&] {
                    char* t = nullptr;
                    check(wc_train_result_trace_csv(r, k, &t), "trace");
                    return t;
                }());
                write_file(fs::path(exp.out) / "traces" / (split_name(s) + "_net" + std::to_string(k + 1) + ".csv"),
                           trace);
                size_t iters = 0;
                wc_train_result_loss_trace(r, k, &iters);
                summary += std::to_string(s) + ',' + std::to_string(k + 1) + ',' +
                           std::to_string(wc_train_result_seed(r, k)) + ',' + fmt(wc_train_result_initial_mae(r, k)) +
                           ',' + fmt(wc_train_result_train_mae(r, k)) + ',' + std::to_string(iters) + '\n';
            }
            std::cout << split_name(s) << ": kept " << wc_train_result_count(r) << " of " << exp.train.seed_pool
                      << " networks, best train MAE " << fmt(wc_train_result_train_mae(r, 0)) << "\n";
        } else if (exp.model == "ar" || exp.model == "var") {
            std::vector<const double*> features{x};
            features.insert(features.end(), conds.begin(), conds.end());
            wc_model* m = nullptr;
            check(wc_model_fit_ar(features.data(), features.size(), len, exp.order, &m), split_name(s));
            const Model model(m);
            describe(m, raw.get(), v, split, 0, 0.0);
            check(wc_model_save(m, ar_checkpoint(exp, s).string().c_str()), "save");
            std::cout << split_name(s) << ": fitted " << exp.model << "(" << exp.order << ")\n";
        } else {
            std::cout << split_name(s) << ": naive model has no parameters\n";
        }
    }
    if (exp.is_network()) {
        write_file(fs::path(exp.out) / "metrics" / "train.csv", summary);
    }
    return exit_ok;
}

int cmd_evaluate(const Experiment& exp)
{
    validate_experiment(exp, Command::Evaluate);
    const Series raw = load_series(exp);
    const auto splits = splits_for(exp, wc_series_length(raw.get()));
    const bool original = metric_scale(exp) == "original";

    struct SplitResult {
        std::vector<std::vector<double>> forecasts;  // per model, metric scale
        ScaledSeries truth;
    };
    std::vector<SplitResult> results;
    for (std::size_t s = 0; s < splits.size(); ++s) {
        const View v = view_for(exp, raw.get(), splits[s]);
        const auto models = load_models(exp, raw.get(), v, splits[s], s);
        SplitResult r;
        r.truth = scaled_actuals(raw.get(), v, splits[s], original);
        if (models.empty()) {
            auto f = one_step(exp, nullptr, v, splits[s]);
            to_scale(f, v, original);
            r.forecasts.push_back(std::move(f));
        }
        for (const auto& m : models) {
            auto f = one_step(exp, m.get(), v, splits[s]);
            to_scale(f, v, original);
            r.forecasts.push_back(std::move(f));
        }
        if (exp.model == "naive") {
            r.forecasts.front() = r.truth.naive;  // exact, independent of normalization round-off
        }
        results.push_back(std::move(r));
    }

    wc_metrics* mp = nullptr;
    check(wc_metrics_create(&mp), "metrics");
    const Metrics metrics(mp);
    auto add_row = [&](const std::string& label, const std::vector<std::vector<double>>& forecasts,
                       const ScaledSeries& truth) {
        std::vector<double> r, m, h;
        const std::size_t n = truth.actual.size();
        for (const auto& f : forecasts) {
            double v = 0.0;
            check(wc_rmse(f.data(), truth.actual.data(), n, &v), label);
            r.push_back(v);
            check(wc_mase(f.data(), truth.actual.data(), truth.naive.data(), n, &v), label);
            m.push_back(v);
            check(wc_hits(f.data(), truth.actual.data(), n, &v), label);
            h.push_back(v);
        }
        check(wc_metrics_add_row(mp, label.c_str(), r.data(), m.data(), h.data(), r.size(), n), label);
    };
    for (std::size_t s = 0; s < results.size(); ++s) {
        add_row(exp.model + " " + split_name(s), results[s].forecasts, results[s].truth);
    }
    if (results.size() > 1) {
        std::size_t members = results.front().forecasts.size();
        for (const auto& r : results) {
            members = std::min(members, r.forecasts.size());
        }
        std::vector<std::vector<double>> joined(members);
        ScaledSeries truth;
        for (const auto& r : results) {
            for (std::size_t k = 0; k < members; ++k) {
                joined[k].insert(joined[k].end(), r.forecasts[k].begin(), r.forecasts[k].end());
            }
            truth.actual.insert(truth.actual.end(), r.truth.actual.begin(), r.truth.actual.end());
            truth.naive.insert(truth.naive.end(), r.truth.naive.begin(), r.truth.naive.end());
        }
        add_row(exp.model + " all", joined, truth);
    }

    fs::create_directories(fs::path(exp.out) / "metrics");
    fs::create_directories(fs::path(exp.out) / "forecasts");
    const std::string csv = take([&] {
        char* t = nullptr;
        check(wc_metrics_csv(mp, &t), "metrics csv");
        return t;
    }());
    const std::string title =
        "One-step forecasts of " + std::string(wc_series_target_name(raw.get())) + " (" + exp.model + ")";
    const std::string table = take([&] {
        char* t = nullptr;
        check(wc_metrics_table(mp, title.c_str(), scale_text(exp, original).c_str(), &t), "metrics table");
        return t;
    }());
    write_file(fs::path(exp.out) / "metrics" / "metrics.csv", csv);
    write_file(fs::path(exp.out) / "metrics" / "metrics.txt", table);

    for (std::size_t s = 0; s < results.size(); ++s) {
        const auto& r = results[s];
        std::string text = "row,timestamp,actual,naive";
        for (std::size_t k = 0; k < r.forecasts.size(); ++k) {
            text += ",forecast_" + std::to_string(k + 1);
        }
        text += ",forecast_mean\n";
        for (std::size_t i = 0; i < r.truth.actual.size(); ++i) {
            const std::size_t row = splits[s].test_begin + i;
            double mean = 0.0;
            text += std::to_string(row) + ',' + csv_cell(wc_series_timestamp(raw.get(), row)) + ',' +
                    fmt(r.truth.actual[i]) + ',' + fmt(r.truth.naive[i]);
            for (const auto& f : r.forecasts) {
                text += ',' + fmt(f[i]);
                mean += f[i];
            }
            text += ',' + fmt(mean / static_cast<double>(r.forecasts.size())) + '\n';
        }
        write_file(fs::path(exp.out) / "forecasts" / ("onestep_" + split_name(s) + ".csv"), text);
    }
    std::cout << table;
    return exit_ok;
}

int cmd_forecast(const Experiment& exp)
{
    validate_experiment(exp, Command::Forecast);
    const Series raw = load_series(exp);
    const std::size_t length = wc_series_length(raw.get());
    const auto splits = splits_for(exp, length);
    const std::size_t s = exp.split < 0 ? splits.size() - 1 : static_cast<std::size_t>(exp.split);
    const wc_split& split = splits[s];
    const View v = view_for(exp, raw.get(), split);
    const auto models = load_models(exp, raw.get(), v, split, s);
    const bool original = metric_scale(exp) == "original";
    const std::size_t origin = exp.origin < 0 ? split.test_begin : static_cast<std::size_t>(exp.origin);

    std::size_t need = 1;
    if (!models.empty()) {
        check(wc_model_history_length(models.front().get(), &need), "history");
    }
    if (origin < need) {
        config_error("forecast origin " + std::to_string(origin) + " leaves " + std::to_string(origin) +
                     " rows of history; the model needs " + std::to_string(need));
    }

    const double* x = v.target();
    const auto conds = v.conds();
    std::vector<std::vector<double>> paths;
    if (models.empty()) {
        paths.emplace_back(exp.steps, x[origin - 1]);
    }
    for (const auto& m : models) {
        std::vector<double> f(exp.steps);
        check(wc_model_forecast(m.get(), x, origin, conds.data(), conds.size(), exp.steps, f.data()), "forecast");
        paths.push_back(std::move(f));
    }
    for (auto& p : paths) {
        to_scale(p, v, original);
    }
    if (models.empty() && original) {
        paths.front().assign(exp.steps, wc_series_target(raw.get())[origin - 1]);
    }

    const double* actual = original ? wc_series_target(raw.get()) : x;
    std::string text = "step,row,timestamp,actual";
    for (std::size_t k = 0; k < paths.size(); ++k) {
        text += ",forecast_" + std::to_string(k + 1);
    }
    text += ",forecast_mean\n";
    for (std::size_t i = 0; i < exp.steps; ++i) {
        const std::size_t row = origin + i;
        text += std::to_string(i + 1) + ',' + std::to_string(row) + ',' + csv_cell(wc_series_timestamp(raw.get(), row)) +
                ',' + (row < length ? fmt(actual[row]) : std::string());
        double mean = 0.0;
        for (const auto& p : paths) {
            text += ',' + fmt(p[i]);
            mean += p[i];
        }
        text += ',' + fmt(mean / static_cast<double>(paths.size())) + '\n';
    }
    fs::create_directories(fs::path(exp.out) / "forecasts");
    const fs::path file = fs::path(exp.out) / "forecasts" / ("forecast_" + split_name(s) + ".csv");
    write_file(file, text);
    std::cout << "wrote " << exp.steps << "-step forecast from row " << origin << " to " << file.string() << "\n";
    return exit_ok;
}

} // namespace cli
