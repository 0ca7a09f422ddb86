#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wavecast {

// --- Lorenz system ---------------------------------------------------------

struct LorenzConfig {
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
    double x0 = 0.0;
    double y0 = 1.0;
    double z0 = 1.05;
    std::size_t num_points = 1500;
    double dt = 0.01;               // sample spacing
    std::size_t substeps = 1;       // RK4 steps per sample
    bool as_printed = false;        // use dZ/dt = XY - beta*Y instead of XY - beta*Z
};

struct LorenzTrajectory {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> z;
};

void validate(const LorenzConfig& config);

/// Classical RK4 with step dt / substeps; sample 0 is the initial point.
LorenzTrajectory lorenz_generate(const LorenzConfig& config);

// --- Returns and normalization ---------------------------------------------

/// R_t = (P_t - P_{t-1}) / P_{t-1}; one element shorter than the input.
std::vector<double> compute_returns(std::span<const double> prices);

struct NormStats {
    double mu = 0.0;
    double sigma = 1.0;

    double apply(double v) const { return (v - mu) / sigma; }
    double invert(double v) const { return v * sigma + mu; }

    bool operator==(const NormStats&) const = default;
};

/// Target plus aligned condition series.
struct SeriesBundle {
    std::string target_name;
    std::vector<double> target;
    std::vector<std::string> condition_names;
    std::vector<std::vector<double>> conditions;
    std::vector<std::string> timestamps;  // empty or one label per row
    std::optional<NormStats> norm;        // set once normalized

    std::size_t length() const noexcept { return target.size(); }
};

/// Throws a data error when series lengths disagree.
void validate(const SeriesBundle& bundle);

/// Population mean and standard deviation pooled over the target and every
/// condition on rows [begin, end).
NormStats pooled_stats(const SeriesBundle& bundle, std::size_t begin, std::size_t end);

/// Standardizes every series with pooled_stats over the training window
/// [train_begin, train_begin + train_len). Rows outside the window do not
/// influence the statistics.
SeriesBundle normalize(const SeriesBundle& bundle, std::size_t train_begin, std::size_t train_len);
inline SeriesBundle normalize(const SeriesBundle& bundle, std::size_t train_len)
{
    return normalize(bundle, 0, train_len);
}

std::vector<double> denormalize(std::span<const double> values, const NormStats& stats);

/// Bundle with every series replaced by its returns; timestamps drop the first row.
SeriesBundle to_returns(const SeriesBundle& prices);

/// Sub-range [begin, end) of every series.
SeriesBundle slice(const SeriesBundle& bundle, std::size_t begin, std::size_t end);

// --- CSV --------------------------------------------------------------------

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Comma-delimited, header row mandatory. Ragged rows are data errors.
CsvTable parse_csv(const std::string& text);
CsvTable read_csv_file(const std::string& path);

struct CsvColumns {
    std::string target;
    std::vector<std::string> conditions;
    std::optional<std::string> timestamp;
    bool forward_fill = false;
};

SeriesBundle bundle_from_table(const CsvTable& table, const CsvColumns& columns);
SeriesBundle load_csv(const std::string& path, const CsvColumns& columns);

// --- Walk-forward splits ----------------------------------------------------

struct SplitPlan {
    std::size_t train_len = 750;
    std::size_t test_len = 350;
};

struct Split {
    std::size_t train_begin = 0;
    std::size_t train_end = 0;  // == test_begin
    std::size_t test_begin = 0;
    std::size_t test_end = 0;

    bool operator==(const Split&) const = default;
};

/// Consecutive windows: split i trains on [i*test, i*test + train) and tests
/// on the following test_len rows. Test ranges tile without overlap.
std::vector<Split> make_splits(std::size_t length, const SplitPlan& plan);

} // namespace wavecast
