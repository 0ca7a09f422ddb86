#include "datagen.hpp"

#include "error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace wavecast {

void validate(const LorenzConfig& c)
{
    require(c.dt > 0.0 && std::isfinite(c.dt), ErrorKind::Config, "Lorenz dt must be positive");
    require(c.num_points >= 2, ErrorKind::Config, "Lorenz trajectory needs at least two points");
    require(c.substeps >= 1, ErrorKind::Config, "Lorenz substeps must be at least 1");
    require(std::isfinite(c.sigma) && std::isfinite(c.rho) && std::isfinite(c.beta), ErrorKind::Config,
            "Lorenz parameters must be finite");
    require(std::isfinite(c.x0) && std::isfinite(c.y0) && std::isfinite(c.z0), ErrorKind::Config,
            "Lorenz initial point must be finite");
}

LorenzTrajectory lorenz_generate(const LorenzConfig& c)
{
    validate(c);
    using State = std::array<double, 3>;
    auto rhs = [&c](const State& s) -> State {
        const double dz = c.as_printed ? s[0] * s[1] - c.beta * s[1] : s[0] * s[1] - c.beta * s[2];
        return {c.sigma * (s[1] - s[0]), s[0] * (c.rho - s[2]) - s[1], dz};
    };
    const double h = c.dt / static_cast<double>(c.substeps);

    LorenzTrajectory out;
    out.x.reserve(c.num_points);
    out.y.reserve(c.num_points);
    out.z.reserve(c.num_points);
    State s{c.x0, c.y0, c.z0};
    out.x.push_back(s[0]);
    out.y.push_back(s[1]);
    out.z.push_back(s[2]);
    for (std::size_t n = 1; n < c.num_points; ++n) {
        for (std::size_t sub = 0; sub < c.substeps; ++sub) {
            const State k1 = rhs(s);
            State tmp;
            for (int i = 0; i < 3; ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
            const State k2 = rhs(tmp);
            for (int i = 0; i < 3; ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
            const State k3 = rhs(tmp);
            for (int i = 0; i < 3; ++i) tmp[i] = s[i] + h * k3[i];
            const State k4 = rhs(tmp);
            for (int i = 0; i < 3; ++i) s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if (!std::isfinite(s[0]) || !std::isfinite(s[1]) || !std::isfinite(s[2])) {
            fail(ErrorKind::Numeric, "Lorenz integration blew up at sample " + std::to_string(n));
        }
        out.x.push_back(s[0]);
        out.y.push_back(s[1]);
        out.z.push_back(s[2]);
    }
    return out;
}

std::vector<double> compute_returns(std::span<const double> prices)
{
    require(prices.size() >= 2, ErrorKind::Data, "returns need at least two prices");
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (!(prices[i] > 0.0) || !std::isfinite(prices[i])) {
            fail(ErrorKind::Data, "price at row " + std::to_string(i) + " is not a positive finite number");
        }
    }
    std::vector<double> out(prices.size() - 1);
    for (std::size_t t = 1; t < prices.size(); ++t) {
        out[t - 1] = (prices[t] - prices[t - 1]) / prices[t - 1];
    }
    return out;
}

void validate(const SeriesBundle& b)
{
    require(b.condition_names.size() == b.conditions.size(), ErrorKind::Data, "condition names and series differ in count");
    for (std::size_t c = 0; c < b.conditions.size(); ++c) {
        if (b.conditions[c].size() != b.target.size()) {
            fail(ErrorKind::Data, "condition '" + b.condition_names[c] + "' has " +
                                      std::to_string(b.conditions[c].size()) + " rows, target has " +
                                      std::to_string(b.target.size()));
        }
    }
    require(b.timestamps.empty() || b.timestamps.size() == b.target.size(), ErrorKind::Data,
            "timestamp column length differs from the series");
}

NormStats pooled_stats(const SeriesBundle& b, std::size_t begin, std::size_t end)
{
    validate(b);
    require(begin < end && end <= b.length(), ErrorKind::Usage, "normalization window lies outside the series");
    std::vector<const std::vector<double>*> series{&b.target};
    for (const auto& c : b.conditions) {
        series.push_back(&c);
    }
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto* s : series) {
        for (std::size_t i = begin; i < end; ++i) {
            sum += (*s)[i];
            ++n;
        }
    }
    const double mu = sum / static_cast<double>(n);
    double sq = 0.0;
    for (const auto* s : series) {
        for (std::size_t i = begin; i < end; ++i) {
            const double d = (*s)[i] - mu;
            sq += d * d;
        }
    }
    const double sigma = std::sqrt(sq / static_cast<double>(n));
    if (!(sigma > 0.0)) {
        fail(ErrorKind::Data, "training window has zero variance; cannot normalize");
    }
    return {mu, sigma};
}

SeriesBundle normalize(const SeriesBundle& b, std::size_t train_begin, std::size_t train_len)
{
    require(train_len >= 1 && train_begin + train_len <= b.length(), ErrorKind::Usage,
            "training window of " + std::to_string(train_len) + " rows exceeds the series length " +
                std::to_string(b.length()));
    const NormStats stats = pooled_stats(b, train_begin, train_begin + train_len);
    SeriesBundle out = b;
    for (double& v : out.target) {
        v = stats.apply(v);
    }
    for (auto& c : out.conditions) {
        for (double& v : c) {
            v = stats.apply(v);
        }
    }
    out.norm = stats;
    return out;
}

std::vector<double> denormalize(std::span<const double> values, const NormStats& stats)
{
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = stats.invert(values[i]);
    }
    return out;
}

SeriesBundle to_returns(const SeriesBundle& prices)
{
    validate(prices);
    SeriesBundle out;
    out.target_name = prices.target_name;
    out.condition_names = prices.condition_names;
    try {
        out.target = compute_returns(prices.target);
    } catch (const Error& e) {
        fail(ErrorKind::Data, "series '" + prices.target_name + "': " + e.what());
    }
    for (std::size_t c = 0; c < prices.conditions.size(); ++c) {
        try {
            out.conditions.push_back(compute_returns(prices.conditions[c]));
        } catch (const Error& e) {
            fail(ErrorKind::Data, "series '" + prices.condition_names[c] + "': " + e.what());
        }
    }
    if (!prices.timestamps.empty()) {
        out.timestamps.assign(prices.timestamps.begin() + 1, prices.timestamps.end());
    }
    return out;
}

SeriesBundle slice(const SeriesBundle& b, std::size_t begin, std::size_t end)
{
    require(begin <= end && end <= b.length(), ErrorKind::Usage, "slice lies outside the series");
    auto cut = [&](const std::vector<double>& v) {
        return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(begin),
                                   v.begin() + static_cast<std::ptrdiff_t>(end));
    };
    SeriesBundle out;
    out.target_name = b.target_name;
    out.target = cut(b.target);
    out.condition_names = b.condition_names;
    for (const auto& c : b.conditions) {
        out.conditions.push_back(cut(c));
    }
    if (!b.timestamps.empty()) {
        out.timestamps.assign(b.timestamps.begin() + static_cast<std::ptrdiff_t>(begin),
                              b.timestamps.begin() + static_cast<std::ptrdiff_t>(end));
    }
    out.norm = b.norm;
    return out;
}

namespace {

std::string trim(std::string s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        cells.push_back(trim(cell));
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

} // namespace

CsvTable parse_csv(const std::string& text)
{
    CsvTable table;
    std::stringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            line.erase(0, 3);
        }
        if (trim(line).empty()) {
            continue;
        }
        auto cells = split_line(line);
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size()) {
            fail(ErrorKind::Data, "line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                      " cells, header has " + std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    require(have_header, ErrorKind::Data, "CSV input has no header row");
    return table;
}

CsvTable read_csv_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::Io, "cannot open CSV file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

SeriesBundle bundle_from_table(const CsvTable& table, const CsvColumns& columns)
{
    auto column_index = [&](const std::string& name) {
        for (std::size_t i = 0; i < table.header.size(); ++i) {
            if (table.header[i] == name) {
                return i;
            }
        }
        fail(ErrorKind::Data, "column '" + name + "' not found in CSV header");
    };
    auto numeric_column = [&](const std::string& name) {
        const std::size_t col = column_index(name);
        std::vector<double> values;
        values.reserve(table.rows.size());
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const std::string& cell = table.rows[r][col];
            // data rows are numbered from 1, below the header
            const std::string where = "row " + std::to_string(r + 1) + ", column '" + name + "'";
            if (cell.empty()) {
                if (!columns.forward_fill) {
                    fail(ErrorKind::Data, "missing value at " + where);
                }
                if (values.empty()) {
                    fail(ErrorKind::Data, "missing value at " + where + " with nothing to forward-fill from");
                }
                values.push_back(values.back());
                continue;
            }
            double v = 0.0;
            const char* begin = cell.data();
            const char* end = cell.data() + cell.size();
            if (*begin == '+') {
                ++begin;
            }
            auto [ptr, ec] = std::from_chars(begin, end, v);
            if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
                fail(ErrorKind::Data, "unparseable value '" + cell + "' at " + where);
            }
            values.push_back(v);
        }
        return values;
    };

    SeriesBundle b;
    b.target_name = columns.target;
    b.target = numeric_column(columns.target);
    for (const auto& name : columns.conditions) {
        b.condition_names.push_back(name);
        b.conditions.push_back(numeric_column(name));
    }
    if (columns.timestamp) {
        const std::size_t col = column_index(*columns.timestamp);
        for (const auto& row : table.rows) {
            b.timestamps.push_back(row[col]);
        }
    }
    return b;
}

SeriesBundle load_csv(const std::string& path, const CsvColumns& columns)
{
    return bundle_from_table(read_csv_file(path), columns);
}

std::vector<Split> make_splits(std::size_t length, const SplitPlan& plan)
{
    require(plan.train_len >= 1 && plan.test_len >= 1, ErrorKind::Config, "split lengths must be positive");
    if (length < plan.train_len + plan.test_len) {
        fail(ErrorKind::Usage, "series of length " + std::to_string(length) + " is shorter than one train+test window (" +
                                   std::to_string(plan.train_len + plan.test_len) + ")");
    }
    const std::size_t count = (length - plan.train_len) / plan.test_len;
    std::vector<Split> splits;
    for (std::size_t i = 0; i < count; ++i) {
        Split s;
        s.train_begin = i * plan.test_len;
        s.train_end = s.train_begin + plan.train_len;
        s.test_begin = s.train_end;
        s.test_end = s.test_begin + plan.test_len;
        splits.push_back(s);
    }
    return splits;
}

} // namespace wavecast
