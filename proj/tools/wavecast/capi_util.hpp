#pragma once

#include <wavecast/wavecast.h>

#include <memory>
#include <stdexcept>
#include <string>

namespace cli {

// Exit codes of the wavecast tool.
enum ExitCode { exit_ok = 0, exit_config = 1, exit_data = 2, exit_numeric = 3 };

class CliError : public std::runtime_error {
public:
    CliError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
    int code() const noexcept { return code_; }

private:
    int code_;
};

inline int exit_code_of(wc_status s)
{
    switch (s) {
    case WC_OK: return exit_ok;
    case WC_ERR_DATA:
    case WC_ERR_FORMAT:
    case WC_ERR_IO: return exit_data;
    case WC_ERR_NUMERIC: return exit_numeric;
    default: return exit_config;
    }
}

inline void check(wc_status s, const std::string& context)
{
    if (s != WC_OK) {
        throw CliError(exit_code_of(s), context + ": " + wc_last_error());
    }
}

[[noreturn]] inline void config_error(const std::string& what) { throw CliError(exit_config, what); }
[[noreturn]] inline void data_error(const std::string& what) { throw CliError(exit_data, what); }

/// Copies a library-allocated string and frees it.
inline std::string take(char* s)
{
    std::string out = s ? s : "";
    wc_string_free(s);
    return out;
}

inline std::string fmt(double v)
{
    char buf[64];
    check(wc_format_double(v, buf, sizeof buf), "format");
    return buf;
}

struct SeriesFree {
    void operator()(wc_series* p) const { wc_series_free(p); }
};
struct ModelFree {
    void operator()(wc_model* p) const { wc_model_free(p); }
};
struct TrainResultFree {
    void operator()(wc_train_result* p) const { wc_train_result_free(p); }
};
struct MetricsFree {
    void operator()(wc_metrics* p) const { wc_metrics_free(p); }
};

using Series = std::unique_ptr<wc_series, SeriesFree>;
using Model = std::unique_ptr<wc_model, ModelFree>;
using TrainResult = std::unique_ptr<wc_train_result, TrainResultFree>;
using Metrics = std::unique_ptr<wc_metrics, MetricsFree>;

} // namespace cli
