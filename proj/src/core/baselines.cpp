#include "baselines.hpp"

#include "error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace wavecast {

namespace {

void check_features(std::span<const std::vector<double>> features)
{
    require(!features.empty(), ErrorKind::Usage, "autoregression needs at least one feature");
    for (const auto& f : features) {
        require(f.size() == features[0].size(), ErrorKind::Data, "feature series differ in length");
    }
}

Eigen::MatrixXd design_matrix(std::span<const std::vector<double>> features, std::size_t order)
{
    const std::size_t n = features[0].size();
    const std::size_t nf = features.size();
    const std::size_t rows = n - order;
    const std::size_t cols = nf * order + 1;
    Eigen::MatrixXd design(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = r + order;  // row predicts time t
        for (std::size_t lag = 1; lag <= order; ++lag) {
            for (std::size_t f = 0; f < nf; ++f) {
                design(r, (lag - 1) * nf + f) = features[f][t - lag];
            }
        }
        design(r, cols - 1) = 1.0;
    }
    return design;
}

double row_predict(const std::vector<double>& coef, std::span<const std::vector<double>> windows, std::size_t order)
{
    const std::size_t nf = windows.size();
    double acc = coef.back();
    for (std::size_t lag = 1; lag <= order; ++lag) {
        for (std::size_t f = 0; f < nf; ++f) {
            const auto& w = windows[f];
            acc += coef[(lag - 1) * nf + f] * w[w.size() - lag];
        }
    }
    return acc;
}

} // namespace

ARModel fit_ar(std::span<const std::vector<double>> features, std::size_t order)
{
    check_features(features);
    require(order >= 1, ErrorKind::Config, "autoregressive order must be at least 1");
    const std::size_t n = features[0].size();
    const std::size_t nf = features.size();
    const std::size_t cols = nf * order + 1;
    if (n <= order || n - order < cols) {
        fail(ErrorKind::Data, "series of length " + std::to_string(n) + " is too short to fit " +
                                  std::to_string(cols) + " coefficients at order " + std::to_string(order));
    }

    const Eigen::MatrixXd design = design_matrix(features, order);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    // Eigen's default pivot threshold (epsilon times the matrix size): lags of
    // smooth series are strongly collinear but still carry information.
    if (qr.rank() < static_cast<Eigen::Index>(cols)) {
        fail(ErrorKind::Data, "autoregression design matrix is rank deficient (rank " + std::to_string(qr.rank()) +
                                  " of " + std::to_string(cols) + ")");
    }

    ARModel model;
    model.order = order;
    model.num_features = nf;
    for (std::size_t f = 0; f < nf; ++f) {
        Eigen::VectorXd target(n - order);
        for (std::size_t r = 0; r < n - order; ++r) {
            target(r) = features[f][r + order];
        }
        const Eigen::VectorXd coef = qr.solve(target);
        std::vector<double> row(coef.data(), coef.data() + coef.size());
        for (double c : row) {
            require(std::isfinite(c), ErrorKind::Numeric, "autoregression produced a non-finite coefficient");
        }
        model.coefficients.push_back(std::move(row));
    }
    return model;
}

std::vector<std::vector<double>> ar_residuals(const ARModel& model, std::span<const std::vector<double>> features)
{
    check_features(features);
    require(features.size() == model.num_features, ErrorKind::Config, "feature count differs from the model");
    const std::size_t n = features[0].size();
    require(n > model.order, ErrorKind::Usage, "series shorter than the model order");
    std::vector<std::vector<double>> residuals(model.num_features, std::vector<double>(n - model.order));
    for (std::size_t t = model.order; t < n; ++t) {
        std::vector<std::vector<double>> windows;
        for (const auto& f : features) {
            windows.emplace_back(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(t));
        }
        const auto pred = predict_ar_all(model, windows);
        for (std::size_t f = 0; f < model.num_features; ++f) {
            residuals[f][t - model.order] = features[f][t] - pred[f];
        }
    }
    return residuals;
}

std::vector<double> predict_ar_all(const ARModel& model, std::span<const std::vector<double>> windows)
{
    require(windows.size() == model.num_features, ErrorKind::Config,
            "model expects " + std::to_string(model.num_features) + " feature windows, got " +
                std::to_string(windows.size()));
    for (const auto& w : windows) {
        if (w.size() < model.order) {
            fail(ErrorKind::Usage, "window of " + std::to_string(w.size()) + " values is shorter than order " +
                                       std::to_string(model.order));
        }
    }
    std::vector<double> out(model.num_features);
    for (std::size_t f = 0; f < model.num_features; ++f) {
        out[f] = row_predict(model.coefficients[f], windows, model.order);
    }
    return out;
}

double predict_ar(const ARModel& model, std::span<const std::vector<double>> windows)
{
    return predict_ar_all(model, windows).front();
}

std::vector<double> forecast_ar(const ARModel& model, std::span<const std::vector<double>> windows, std::size_t steps)
{
    require(steps > 0, ErrorKind::Usage, "forecast horizon must be positive");
    std::vector<std::vector<double>> state(windows.begin(), windows.end());
    std::vector<double> out;
    out.reserve(steps);
    for (std::size_t s = 0; s < steps; ++s) {
        const auto next = predict_ar_all(model, state);
        out.push_back(next.front());
        for (std::size_t f = 0; f < state.size(); ++f) {
            state[f].push_back(next[f]);
        }
    }
    return out;
}

double predict_naive(std::span<const double> history)
{
    require(!history.empty(), ErrorKind::Usage, "naive forecast needs a non-empty history");
    return history.back();
}

} // namespace wavecast
