#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wavecast {

/// Length-by-channels array of doubles, stored position-major:
/// element (i, c) lives at data[i * channels + c].
///
/// Every entry is finite; the constructors reject NaN/Inf.
class FeatureMap {
public:
    FeatureMap(std::size_t len, std::size_t channels);
    FeatureMap(std::size_t len, std::size_t channels, std::vector<double> data);

    /// Single-channel map from a series.
    static FeatureMap from_series(std::span<const double> series);

    std::size_t len() const noexcept { return len_; }
    std::size_t channels() const noexcept { return channels_; }
    std::size_t size() const noexcept { return data_.size(); }

    double operator()(std::size_t i, std::size_t c) const noexcept { return data_[i * channels_ + c]; }
    double& operator()(std::size_t i, std::size_t c) noexcept { return data_[i * channels_ + c]; }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    /// Values of one channel, one per position.
    std::vector<double> channel(std::size_t c) const;

    bool operator==(const FeatureMap&) const = default;

private:
    std::size_t len_;
    std::size_t channels_;
    std::vector<double> data_;
};

/// Convolution filter with `taps` weights per (input, output) channel pair.
/// Weight (j, m, h) lives at weights[(j * in_channels + m) * out_channels + h].
/// Tap j = 0 multiplies the current position, tap j multiplies position i - dilation * j.
struct ConvFilter {
    std::size_t taps = 1;
    std::size_t in_channels = 1;
    std::size_t out_channels = 1;
    std::size_t dilation = 1;
    std::vector<double> weights;
    std::vector<double> bias;

    ConvFilter() = default;
    ConvFilter(std::size_t taps, std::size_t in_channels, std::size_t out_channels, std::size_t dilation);

    double weight(std::size_t j, std::size_t m, std::size_t h) const noexcept
    {
        return weights[(j * in_channels + m) * out_channels + h];
    }
    double& weight(std::size_t j, std::size_t m, std::size_t h) noexcept
    {
        return weights[(j * in_channels + m) * out_channels + h];
    }

    /// Positions consumed beyond the first output: dilation * (taps - 1).
    std::size_t span() const noexcept { return dilation * (taps - 1); }

    /// Throws a config error when the array sizes disagree with the declared shape.
    void validate() const;

    bool operator==(const ConvFilter&) const = default;
};

// Forward kernels. All are valid-mode; padding is explicit via left_pad_zeros.

FeatureMap causal_dilated_conv(const FeatureMap& input, const ConvFilter& filter);
FeatureMap conv_1x1(const FeatureMap& input, const ConvFilter& filter);
FeatureMap relu(const FeatureMap& input);
FeatureMap add(const FeatureMap& a, const FeatureMap& b);
FeatureMap left_pad_zeros(const FeatureMap& input, std::size_t count);
FeatureMap drop_leading(const FeatureMap& input, std::size_t count);

// Adjoint kernels used by the tape.

/// Accumulates d(loss)/d(input), d(loss)/d(weights), d(loss)/d(bias) given d(loss)/d(output).
void causal_dilated_conv_backward(const FeatureMap& input, const ConvFilter& filter, const FeatureMap& grad_output,
                                  FeatureMap* grad_input, ConvFilter* grad_filter);

/// Throws a numeric error naming `what` if any entry is non-finite.
void check_finite(std::span<const double> values, const char* what);

} // namespace wavecast
