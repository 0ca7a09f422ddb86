#include "check_error.hpp"
#include "core/feature_map.hpp"
#include "core/tape.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace wavecast;

namespace {

FeatureMap series(std::vector<double> v) { return FeatureMap::from_series(v); }

ConvFilter filter1(std::vector<double> w, std::size_t dilation)
{
    ConvFilter f(w.size(), 1, 1, dilation);
    f.weights = std::move(w);
    return f;
}

} // namespace

TEST_CASE("causal dilated conv examples")
{
    auto x = series({1, 2, 3, 4});
    CHECK(causal_dilated_conv(x, filter1({1, 0}, 1)).channel(0) == std::vector<double>{2, 3, 4});
    CHECK(causal_dilated_conv(x, filter1({1, 1}, 1)).channel(0) == std::vector<double>{3, 5, 7});
    CHECK(causal_dilated_conv(x, filter1({1, 1}, 2)).channel(0) == std::vector<double>{4, 6});
    // tap 1 reaches back one dilation step
    CHECK(causal_dilated_conv(x, filter1({0, 1}, 1)).channel(0) == std::vector<double>{1, 2, 3});
}

TEST_CASE("causal dilated conv matches the summation oracle on random shapes")
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::size_t> small(1, 4);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t taps = small(rng), in = small(rng), out = small(rng), d = small(rng);
        const std::size_t len = d * (taps - 1) + small(rng) + 3;
        auto input = oracle::random_map(rng, len, in);
        auto f = oracle::random_filter(rng, taps, in, out, d);
        auto got = oracle::rows_of(causal_dilated_conv(input, f));
        auto want = oracle::conv(oracle::rows_of(input), f);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            for (std::size_t h = 0; h < out; ++h) {
                CHECK(got[i][h] == doctest::Approx(want[i][h]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("causal dilated conv errors")
{
    auto x = series({1, 2, 3});
    CHECK_ERROR_KIND(causal_dilated_conv(x, filter1({1, 1}, 4)), ErrorKind::Config);  // span exceeds input
    ConvFilter two_in(2, 2, 1, 1);
    CHECK_ERROR_KIND(causal_dilated_conv(x, two_in), ErrorKind::Config);
}

TEST_CASE("conv 1x1 examples")
{
    auto x = series({1.5, -2, 3});
    auto id = filter1({1}, 1);
    CHECK(conv_1x1(x, id) == x);

    FeatureMap ab(3, 2, {1, 2, 3, 4, 5, 6});
    ConvFilter sum(1, 2, 1, 1);
    sum.weights = {1, 1};
    CHECK(conv_1x1(ab, sum).channel(0) == std::vector<double>{3, 7, 11});

    std::mt19937_64 rng(3);
    auto m = oracle::random_map(rng, 7, 3);
    auto f = oracle::random_filter(rng, 1, 3, 2, 1);
    auto got = conv_1x1(m, f);
    for (std::size_t i = 0; i < 7; ++i) {
        for (std::size_t h = 0; h < 2; ++h) {
            double want = f.bias[h];
            for (std::size_t c = 0; c < 3; ++c) {
                want += m(i, c) * f.weights[c * 2 + h];
            }
            CHECK(got(i, h) == doctest::Approx(want).epsilon(1e-12));
        }
    }
    CHECK_ERROR_KIND(conv_1x1(x, sum), ErrorKind::Config);
}

TEST_CASE("relu, add and padding")
{
    CHECK(relu(series({-1, 0, 2})).channel(0) == std::vector<double>{0, 0, 2});
    auto pos = series({0, 1, 2.5});
    CHECK(relu(pos) == pos);

    std::mt19937_64 rng(5);
    auto r = oracle::random_map(rng, 20, 3);
    auto rr = relu(r);
    auto s = oracle::random_map(rng, 20, 3);
    auto sum = add(r, s);
    for (std::size_t i = 0; i < r.size(); ++i) {
        CHECK(rr.data()[i] == std::max(r.data()[i], 0.0));
        CHECK(sum.data()[i] == r.data()[i] + s.data()[i]);
    }

    CHECK(add(r, FeatureMap(20, 3)) == r);
    CHECK(add(series({1, 2}), series({3, 4})).channel(0) == std::vector<double>{4, 6});
    CHECK_ERROR_KIND(add(series({1, 2}), series({1, 2, 3})), ErrorKind::Config);

    CHECK(left_pad_zeros(series({5}), 2).channel(0) == std::vector<double>{0, 0, 5});
    CHECK(left_pad_zeros(r, 0) == r);
    auto padded = left_pad_zeros(r, 16);
    REQUIRE(padded.len() == 36);
    for (std::size_t i = 0; i < 16; ++i) {
        for (std::size_t c = 0; c < 3; ++c) {
            CHECK(padded(i, c) == 0.0);
        }
    }
    CHECK(drop_leading(padded, 16) == r);
}

TEST_CASE("feature maps reject non-finite entries")
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_ERROR_KIND(FeatureMap(2, 1, {1.0, nan}), ErrorKind::Numeric);
    CHECK_ERROR_KIND(FeatureMap(2, 1, {1.0}), ErrorKind::Config);
}

TEST_CASE("convolution is linear in its input when the bias is zero")
{
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        auto a = oracle::random_map(rng, 30, 2);
        auto b = oracle::random_map(rng, 30, 2);
        auto f = oracle::random_filter(rng, 3, 2, 2, 2);
        std::fill(f.bias.begin(), f.bias.end(), 0.0);
        const double alpha = 0.7, beta = -1.3;
        FeatureMap mix(30, 2);
        for (std::size_t i = 0; i < mix.size(); ++i) {
            mix.data()[i] = alpha * a.data()[i] + beta * b.data()[i];
        }
        auto lhs = causal_dilated_conv(mix, f);
        auto ca = causal_dilated_conv(a, f);
        auto cb = causal_dilated_conv(b, f);
        for (std::size_t i = 0; i < lhs.size(); ++i) {
            CHECK(lhs.data()[i] == doctest::Approx(alpha * ca.data()[i] + beta * cb.data()[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("stacked dilated convs on a padded input produce length N + 1")
{
    for (std::size_t layers = 1; layers <= 6; ++layers) {
        const std::size_t n = 40;
        const std::size_t r = std::size_t{1} << layers;
        auto h = left_pad_zeros(FeatureMap(n, 1), r);
        for (std::size_t l = 0; l < layers; ++l) {
            h = causal_dilated_conv(h, ConvFilter(2, 1, 1, std::size_t{1} << l));
        }
        CHECK(h.len() == n + 1);
    }
}
