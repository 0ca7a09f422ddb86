#include "check_error.hpp"
#include "core/tape.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

using namespace wavecast;

namespace {

using Var = GradientTape::Var;

// A random smooth-ish read-out so that every upstream entry receives a
// distinct, position-dependent adjoint: sum(relu(conv(h, mixer))).
struct Readout {
    ConvFilter mixer;
    Var apply(GradientTape& tape, Var h) const { return tape.sum(tape.relu(tape.conv(h, mixer, 1000))); }
};

Readout make_readout(std::mt19937_64& rng, std::size_t channels)
{
    auto f = oracle::random_filter(rng, 2, channels, 2, 1);
    for (double& b : f.bias) {
        b = std::abs(b) + 0.5;  // most units active
    }
    return {f};
}

// Checks analytic gradients of `loss(input, filters...)` against finite
// differences for every input entry and every weight and bias of `filters`.
// `build` records the loss on a tape and returns it together with the input node.
void check_gradients(FeatureMap& input, std::vector<ConvFilter*> filters,
                     const std::function<std::pair<Var, Var>(GradientTape&)>& build, int& kinks)
{
    GradientTape tape;
    auto [loss, in_node] = build(tape);
    Gradients grads = tape.backward(loss);
    const FeatureMap in_adj = tape.adjoint(in_node);

    auto eval = [&]() {
        GradientTape t;
        return t.scalar(build(t).first);
    };
    for (std::size_t i = 0; i < input.size(); ++i) {
        double& slot = input.data()[i];
        const double saved = slot;
        auto d = oracle::finite_difference(
            [&](double v) {
                slot = v;
                return eval();
            },
            saved, 1e-5);
        slot = saved;
        kinks += d.kink;
        CHECK_MESSAGE(oracle::gradient_agrees(in_adj.data()[i], d), "input entry " << i);
    }
    for (std::size_t k = 0; k < filters.size(); ++k) {
        ConvFilter& f = *filters[k];
        const ConvFilter g = grads.at(k);
        auto probe = [&](double& slot, double analytic, const std::string& what, std::size_t idx) {
            const double saved = slot;
            auto d = oracle::finite_difference(
                [&](double v) {
                    slot = v;
                    return eval();
                },
                saved, 1e-5);
            slot = saved;
            kinks += d.kink;
            CHECK_MESSAGE(oracle::gradient_agrees(analytic, d), "filter " << k << " " << what << " " << idx << ": analytic " << analytic << ", central " << d.central);
        };
        for (std::size_t i = 0; i < f.weights.size(); ++i) {
            probe(f.weights[i], g.weights[i], "weight", i);
        }
        for (std::size_t i = 0; i < f.bias.size(); ++i) {
            probe(f.bias[i], g.bias[i], "bias", i);
        }
    }
}

} // namespace

TEST_CASE("backward examples")
{
    // loss = sum(relu(w x)) with w, x > 0: dloss/dw = sum x
    FeatureMap x = FeatureMap::from_series(std::vector<double>{0.5, 1.0, 2.0});
    ConvFilter w(1, 1, 1, 1);
    w.weights = {3.0};
    ConvFilter unused(1, 1, 1, 1);
    unused.weights = {2.0};

    GradientTape tape;
    auto in = tape.constant(x);
    auto loss = tape.sum(tape.relu(tape.conv(in, w, 0)));
    tape.conv(in, unused, 1);  // recorded but does not reach the loss
    auto g = tape.backward(loss);
    CHECK(g.at(0).weights[0] == doctest::Approx(3.5));
    CHECK(g.at(0).bias[0] == doctest::Approx(3.0));
    CHECK(g.at(1).weights[0] == 0.0);
    CHECK(g.at(1).bias[0] == 0.0);
}

TEST_CASE("relu subgradient at zero is zero")
{
    GradientTape tape;
    auto in = tape.constant(FeatureMap::from_series(std::vector<double>{0.0, 1.0, -1.0}));
    auto loss = tape.sum(tape.relu(in));
    tape.backward(loss);
    CHECK(tape.adjoint(in).channel(0) == std::vector<double>{0.0, 1.0, 0.0});
}

TEST_CASE("tape usage errors")
{
    GradientTape a;
    GradientTape b;
    auto va = a.constant(FeatureMap(2, 1));
    CHECK_ERROR_KIND(b.relu(va), ErrorKind::Usage);
    CHECK_ERROR_KIND(b.backward(va), ErrorKind::Usage);
    CHECK_ERROR_KIND(a.backward(va), ErrorKind::Usage);  // not a scalar
    auto s = a.sum(va);
    a.backward(s);
    CHECK_ERROR_KIND(a.backward(GradientTape::Var{&a, 99}), ErrorKind::Usage);
    Gradients empty;
    CHECK_ERROR_KIND(empty.at(3), ErrorKind::Usage);
}

TEST_CASE("finite-difference gradients of every recorded operation")
{
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> small(1, 3);
    int kinks = 0;
    const int instances = 100;

    SUBCASE("dilated and 1x1 convolution")
    {
        for (int trial = 0; trial < instances; ++trial) {
            const std::size_t taps = small(rng), in = small(rng), out = small(rng), d = small(rng);
            auto x = oracle::random_map(rng, d * (taps - 1) + 6, in);
            auto f = oracle::random_filter(rng, taps, in, out, d);
            auto one = oracle::random_filter(rng, 1, out, out, 1);
            auto ro = make_readout(rng, out);
            check_gradients(x, {&f, &one},
                            [&](GradientTape& t) {
                                auto v = t.constant(x);
                                auto h = t.conv(t.conv(v, f, 0), one, 1);
                                return std::pair{ro.apply(t, h), v};
                            },
                            kinks);
        }
    }
    SUBCASE("relu, add, scale")
    {
        for (int trial = 0; trial < instances; ++trial) {
            const std::size_t ch = small(rng);
            auto x = oracle::random_map(rng, 8, ch);
            auto f = oracle::random_filter(rng, 2, ch, ch, 1);
            auto ro = make_readout(rng, ch);
            check_gradients(x, {&f},
                            [&](GradientTape& t) {
                                auto v = t.constant(x);
                                auto a = t.relu(t.conv(v, f, 0));
                                auto h = t.add(t.scale(a, -0.75), t.drop_leading(v, 1));
                                return std::pair{ro.apply(t, h), v};
                            },
                            kinks);
        }
    }
    SUBCASE("left pad and drop leading")
    {
        for (int trial = 0; trial < instances; ++trial) {
            const std::size_t ch = small(rng);
            auto x = oracle::random_map(rng, 7, ch);
            auto f = oracle::random_filter(rng, 2, ch, ch, 2);
            auto ro = make_readout(rng, ch);
            check_gradients(x, {&f},
                            [&](GradientTape& t) {
                                auto v = t.constant(x);
                                auto p = t.left_pad(v, 3);
                                auto h = t.drop_leading(t.conv(p, f, 0), 1);
                                return std::pair{ro.apply(t, h), v};
                            },
                            kinks);
        }
    }
    SUBCASE("mean absolute error and squared weights")
    {
        for (int trial = 0; trial < instances; ++trial) {
            auto x = oracle::random_map(rng, 10, 1);
            auto f = oracle::random_filter(rng, 2, 1, 1, 1);
            auto targets = oracle::normal_vector(rng, 6);
            check_gradients(x, {&f},
                            [&](GradientTape& t) {
                                auto v = t.constant(x);
                                auto pred = t.conv(v, f, 0);
                                auto mae = t.mean_abs_error(pred, targets, 2);
                                auto l2 = t.scale(t.squared_weights(f, 0), 0.05);
                                return std::pair{t.add(mae, l2), v};
                            },
                            kinks);
        }
    }
    MESSAGE("stencils straddling a kink: " << kinks);
}

TEST_CASE("finite inputs give finite outputs and gradients")
{
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        auto x = oracle::random_map(rng, 12, 2);
        for (double& v : x.data()) {
            v *= 1e3;
        }
        auto f = oracle::random_filter(rng, 2, 2, 3, 2, 10.0);
        GradientTape t;
        auto in = t.constant(x);
        auto loss = t.sum(t.relu(t.conv(in, f, 0)));
        auto g = t.backward(loss);
        CHECK(std::isfinite(t.scalar(loss)));
        for (double v : t.adjoint(in).data()) {
            CHECK(std::isfinite(v));
        }
        for (double v : g.at(0).weights) {
            CHECK(std::isfinite(v));
        }
    }
}
