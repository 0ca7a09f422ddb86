#include "feature_map.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wavecast {

void check_finite(std::span<const double> values, const char* what)
{
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            fail(ErrorKind::Numeric, std::string(what) + ": non-finite value at flat index " + std::to_string(i));
        }
    }
}

FeatureMap::FeatureMap(std::size_t len, std::size_t channels)
    : len_(len), channels_(channels), data_(len * channels, 0.0)
{
    require(len > 0 && channels > 0, ErrorKind::Config, "feature map needs positive length and channel count");
}

FeatureMap::FeatureMap(std::size_t len, std::size_t channels, std::vector<double> data)
    : len_(len), channels_(channels), data_(std::move(data))
{
    require(len > 0 && channels > 0, ErrorKind::Config, "feature map needs positive length and channel count");
    require(data_.size() == len * channels, ErrorKind::Config,
            "feature map data has " + std::to_string(data_.size()) + " entries, expected " +
                std::to_string(len * channels));
    check_finite(data_, "feature map");
}

FeatureMap FeatureMap::from_series(std::span<const double> series)
{
    return FeatureMap(series.size(), 1, std::vector<double>(series.begin(), series.end()));
}

std::vector<double> FeatureMap::channel(std::size_t c) const
{
    std::vector<double> out(len_);
    for (std::size_t i = 0; i < len_; ++i) {
        out[i] = (*this)(i, c);
    }
    return out;
}

ConvFilter::ConvFilter(std::size_t taps_, std::size_t in_, std::size_t out_, std::size_t dilation_)
    : taps(taps_), in_channels(in_), out_channels(out_), dilation(dilation_),
      weights(taps_ * in_ * out_, 0.0), bias(out_, 0.0)
{
    validate();
}

void ConvFilter::validate() const
{
    require(taps > 0 && in_channels > 0 && out_channels > 0 && dilation > 0, ErrorKind::Config,
            "filter dimensions and dilation must be positive");
    require(weights.size() == taps * in_channels * out_channels, ErrorKind::Config,
            "filter weight array has " + std::to_string(weights.size()) + " entries, expected " +
                std::to_string(taps * in_channels * out_channels));
    require(bias.size() == out_channels, ErrorKind::Config,
            "filter bias array has " + std::to_string(bias.size()) + " entries, expected " +
                std::to_string(out_channels));
}

FeatureMap causal_dilated_conv(const FeatureMap& input, const ConvFilter& filter)
{
    if (input.channels() != filter.in_channels) {
        fail(ErrorKind::Config, "convolution expects " + std::to_string(filter.in_channels) +
                                    " input channels, got " + std::to_string(input.channels()));
    }
    const std::size_t span = filter.span();
    if (input.len() <= span) {
        fail(ErrorKind::Config, "convolution input of length " + std::to_string(input.len()) +
                                    " is too short for a filter spanning " + std::to_string(span + 1) +
                                    " positions");
    }
    const std::size_t out_len = input.len() - span;
    const std::size_t in_ch = filter.in_channels;
    const std::size_t out_ch = filter.out_channels;

    FeatureMap result(out_len, out_ch);
    double* out = result.data().data();
    const double* x = input.data().data();
    for (std::size_t i = 0; i < out_len; ++i) {
        double* row = out + i * out_ch;
        std::copy(filter.bias.begin(), filter.bias.end(), row);
        const std::size_t current = i + span;
        for (std::size_t j = 0; j < filter.taps; ++j) {
            const double* src = x + (current - filter.dilation * j) * in_ch;
            const double* w = filter.weights.data() + j * in_ch * out_ch;
            for (std::size_t m = 0; m < in_ch; ++m) {
                const double v = src[m];
                const double* wm = w + m * out_ch;
                for (std::size_t h = 0; h < out_ch; ++h) {
                    row[h] += wm[h] * v;
                }
            }
        }
    }
    check_finite(result.data(), "convolution output");
    return result;
}

FeatureMap conv_1x1(const FeatureMap& input, const ConvFilter& filter)
{
    require(filter.taps == 1 && filter.dilation == 1, ErrorKind::Config, "1x1 convolution needs a single-tap filter");
    return causal_dilated_conv(input, filter);
}

FeatureMap relu(const FeatureMap& input)
{
    FeatureMap out(input.len(), input.channels());
    auto src = input.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = src[i] > 0.0 ? src[i] : 0.0;
    }
    return out;
}

FeatureMap add(const FeatureMap& a, const FeatureMap& b)
{
    if (a.len() != b.len() || a.channels() != b.channels()) {
        fail(ErrorKind::Config, "cannot add " + std::to_string(a.len()) + "x" + std::to_string(a.channels()) +
                                    " and " + std::to_string(b.len()) + "x" + std::to_string(b.channels()) +
                                    " feature maps");
    }
    FeatureMap out(a.len(), a.channels());
    auto x = a.data();
    auto y = b.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = x[i] + y[i];
    }
    check_finite(dst, "sum");
    return out;
}

FeatureMap left_pad_zeros(const FeatureMap& input, std::size_t count)
{
    FeatureMap out(input.len() + count, input.channels());
    std::copy(input.data().begin(), input.data().end(), out.data().begin() + count * input.channels());
    return out;
}

FeatureMap drop_leading(const FeatureMap& input, std::size_t count)
{
    require(count < input.len(), ErrorKind::Config, "cannot drop every position of a feature map");
    FeatureMap out(input.len() - count, input.channels());
    std::copy(input.data().begin() + count * input.channels(), input.data().end(), out.data().begin());
    return out;
}

void causal_dilated_conv_backward(const FeatureMap& input, const ConvFilter& filter, const FeatureMap& grad_output,
                                  FeatureMap* grad_input, ConvFilter* grad_filter)
{
    const std::size_t span = filter.span();
    const std::size_t out_len = grad_output.len();
    const std::size_t in_ch = filter.in_channels;
    const std::size_t out_ch = filter.out_channels;
    const double* x = input.data().data();
    const double* g = grad_output.data().data();
    double* gx = grad_input ? grad_input->data().data() : nullptr;

    for (std::size_t i = 0; i < out_len; ++i) {
        const double* gi = g + i * out_ch;
        if (grad_filter) {
            for (std::size_t h = 0; h < out_ch; ++h) {
                grad_filter->bias[h] += gi[h];
            }
        }
        const std::size_t current = i + span;
        for (std::size_t j = 0; j < filter.taps; ++j) {
            const std::size_t pos = current - filter.dilation * j;
            const double* src = x + pos * in_ch;
            const double* w = filter.weights.data() + j * in_ch * out_ch;
            double* gw = grad_filter ? grad_filter->weights.data() + j * in_ch * out_ch : nullptr;
            for (std::size_t m = 0; m < in_ch; ++m) {
                double acc = 0.0;
                const double v = src[m];
                for (std::size_t h = 0; h < out_ch; ++h) {
                    acc += w[m * out_ch + h] * gi[h];
                    if (gw) {
                        gw[m * out_ch + h] += v * gi[h];
                    }
                }
                if (gx) {
                    gx[pos * in_ch + m] += acc;
                }
            }
        }
    }
}

} // namespace wavecast
