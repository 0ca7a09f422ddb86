#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace wavecast {

double rmse(std::span<const double> forecasts, std::span<const double> actuals);

/// mean|forecast - actual| / mean|naive - actual| over the same points.
/// Throws a usage error when the naive MAE is zero.
double mase(std::span<const double> forecasts, std::span<const double> actuals, std::span<const double> naive);

/// Fraction of points whose forecast and actual share a sign; zero counts as positive.
double hits(std::span<const double> forecasts, std::span<const double> actuals);

struct MetricSummary {
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
    std::vector<double> values;
};

MetricSummary summarize(std::span<const double> values);

struct SeedMetrics {
    double rmse = 0.0;
    double mase = 0.0;
    double hits = 0.0;
};

struct MetricsReport {
    MetricSummary rmse;
    MetricSummary mase;
    MetricSummary hits;
    std::size_t n_points = 0;
};

MetricsReport aggregate(std::span<const SeedMetrics> per_seed, std::size_t n_points);

/// Scores one forecast vector; the naive forecast of point i is actuals'
/// preceding value, passed in explicitly.
SeedMetrics score(std::span<const double> forecasts, std::span<const double> actuals, std::span<const double> naive);

/// One labelled row of a metrics table.
struct MetricsRow {
    std::string label;  // e.g. model name or split
    MetricsReport report;
};

/// CSV with columns label,metric,mean,std,n_seeds,n_points,values (values ';'-separated).
std::string metrics_csv(std::span<const MetricsRow> rows);

/// Fixed-width text table: one row per label, one "mean (std)" column per metric.
std::string metrics_table(std::span<const MetricsRow> rows, const std::string& title, const std::string& scale);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

} // namespace wavecast
