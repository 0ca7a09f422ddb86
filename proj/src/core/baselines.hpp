#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wavecast {

/// Linear one-step model over p lags of F features (F = 1: AR, F > 1: VAR).
/// Row f of `coefficients` predicts feature f; its columns are
/// [lag 1 of features 0..F-1, lag 2 of features 0..F-1, ..., lag p ..., intercept].
struct ARModel {
    std::size_t order = 1;
    std::size_t num_features = 1;
    std::vector<std::vector<double>> coefficients;

    double coefficient(std::size_t feature, std::size_t lag, std::size_t source) const
    {
        return coefficients[feature][(lag - 1) * num_features + source];
    }
    double intercept(std::size_t feature) const { return coefficients[feature].back(); }

    bool operator==(const ARModel&) const = default;
};

/// Ordinary least squares fit on aligned feature series (feature 0 is the
/// target). Throws a data error on a rank-deficient design matrix.
ARModel fit_ar(std::span<const std::vector<double>> features, std::size_t order);

/// Design-matrix residuals of a fitted model on its training features, one
/// column per feature; used to check orthogonality.
std::vector<std::vector<double>> ar_residuals(const ARModel& model, std::span<const std::vector<double>> features);

/// Next value of every feature from windows whose last element is the most
/// recent observation. Each window needs at least `order` values.
std::vector<double> predict_ar_all(const ARModel& model, std::span<const std::vector<double>> windows);

/// Next value of the target (feature 0).
double predict_ar(const ARModel& model, std::span<const std::vector<double>> windows);

/// Recursive n-step target forecast; every feature is fed back.
std::vector<double> forecast_ar(const ARModel& model, std::span<const std::vector<double>> windows, std::size_t steps);

/// Random-walk forecast: the last observed value.
double predict_naive(std::span<const double> history);

} // namespace wavecast
