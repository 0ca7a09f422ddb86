#include "eval.hpp"

#include "error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace wavecast {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b, const char* metric)
{
    require(!a.empty(), ErrorKind::Usage, std::string(metric) + " needs at least one point");
    if (a.size() != b.size()) {
        fail(ErrorKind::Usage, std::string(metric) + ": " + std::to_string(a.size()) + " forecasts vs " +
                                   std::to_string(b.size()) + " actuals");
    }
}

double mean_abs_diff(std::span<const double> a, std::span<const double> b)
{
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        total += std::abs(a[i] - b[i]);
    }
    return total / static_cast<double>(a.size());
}

std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

} // namespace

double rmse(std::span<const double> forecasts, std::span<const double> actuals)
{
    check_pair(forecasts, actuals, "rmse");
    double total = 0.0;
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        const double d = forecasts[i] - actuals[i];
        total += d * d;
    }
    return std::sqrt(total / static_cast<double>(forecasts.size()));
}

double mase(std::span<const double> forecasts, std::span<const double> actuals, std::span<const double> naive)
{
    check_pair(forecasts, actuals, "mase");
    check_pair(naive, actuals, "mase");
    const double denom = mean_abs_diff(naive, actuals);
    if (!(denom > 0.0)) {
        fail(ErrorKind::Usage, "mase is undefined: the naive forecast has zero error");
    }
    return mean_abs_diff(forecasts, actuals) / denom;
}

double hits(std::span<const double> forecasts, std::span<const double> actuals)
{
    check_pair(forecasts, actuals, "hits");
    std::size_t same = 0;
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        if ((forecasts[i] >= 0.0) == (actuals[i] >= 0.0)) {
            ++same;
        }
    }
    return static_cast<double>(same) / static_cast<double>(forecasts.size());
}

MetricSummary summarize(std::span<const double> values)
{
    require(!values.empty(), ErrorKind::Usage, "summary needs at least one value");
    MetricSummary s;
    s.values.assign(values.begin(), values.end());
    double total = 0.0;
    for (double v : values) {
        total += v;
    }
    s.mean = total / static_cast<double>(values.size());
    if (values.size() > 1) {
        double sq = 0.0;
        for (double v : values) {
            sq += (v - s.mean) * (v - s.mean);
        }
        s.std = std::sqrt(sq / static_cast<double>(values.size()));
    }
    return s;
}

MetricsReport aggregate(std::span<const SeedMetrics> per_seed, std::size_t n_points)
{
    require(!per_seed.empty(), ErrorKind::Usage, "aggregate needs at least one seed");
    std::vector<double> r, m, h;
    for (const auto& s : per_seed) {
        r.push_back(s.rmse);
        m.push_back(s.mase);
        h.push_back(s.hits);
    }
    return {summarize(r), summarize(m), summarize(h), n_points};
}

SeedMetrics score(std::span<const double> forecasts, std::span<const double> actuals, std::span<const double> naive)
{
    return {rmse(forecasts, actuals), mase(forecasts, actuals, naive), hits(forecasts, actuals)};
}

std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string metrics_csv(std::span<const MetricsRow> rows)
{
    std::string out = "label,metric,mean,std,n_seeds,n_points,values\n";
    for (const auto& row : rows) {
        const std::pair<const char*, const MetricSummary*> metrics[] = {
            {"rmse", &row.report.rmse}, {"mase", &row.report.mase}, {"hits", &row.report.hits}};
        for (const auto& [name, summary] : metrics) {
            out += row.label + ',' + name + ',' + format_double(summary->mean) + ',' + format_double(summary->std) +
                   ',' + std::to_string(summary->values.size()) + ',' + std::to_string(row.report.n_points) + ',';
            for (std::size_t i = 0; i < summary->values.size(); ++i) {
                if (i) out += ';';
                out += format_double(summary->values[i]);
            }
            out += '\n';
        }
    }
    return out;
}

std::string metrics_table(std::span<const MetricsRow> rows, const std::string& title, const std::string& scale)
{
    std::size_t label_width = 5;
    for (const auto& row : rows) {
        label_width = std::max(label_width, row.label.size());
    }
    auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) s.append(w - s.size(), ' ');
        return s;
    };
    auto cell = [&](const MetricSummary& m, int digits) {
        return fixed(m.mean, digits) + " (" + fixed(m.std, digits) + ")";
    };
    std::string out = title + "\nscale: " + scale + "\n\n";
    out += pad("Model", label_width) + " | " + pad("RMSE", 22) + " | " + pad("MASE", 18) + " | HITS\n";
    out += std::string(label_width, '-') + "-+-" + std::string(22, '-') + "-+-" + std::string(18, '-') + "-+-" +
           std::string(16, '-') + "\n";
    for (const auto& row : rows) {
        out += pad(row.label, label_width) + " | " + pad(cell(row.report.rmse, 5), 22) + " | " +
               pad(cell(row.report.mase, 3), 18) + " | " + cell(row.report.hits, 3) + "\n";
    }
    out += "\nvalues are mean (standard deviation) over selected seeds\n";
    return out;
}

} // namespace wavecast
