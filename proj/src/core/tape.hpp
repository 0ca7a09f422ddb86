#pragma once

#include "feature_map.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace wavecast {

/// Identifies a trainable filter across forward passes. The network assigns
/// keys in its fixed parameter order.
using ParamKey = std::size_t;

/// Gradient store: one filter-shaped entry per parameter the forward pass touched.
class Gradients {
public:
    bool contains(ParamKey key) const { return entries_.count(key) != 0; }
    const ConvFilter& at(ParamKey key) const;
    ConvFilter& slot(ParamKey key, const ConvFilter& shape);
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::map<ParamKey, ConvFilter> entries_;
};

/// Records FeatureMap operations in execution order and replays their
/// adjoints in reverse. Filters are referenced, not copied, and must outlive
/// the tape. A tape belongs to a single forward/backward pass on one thread.
class GradientTape {
public:
    struct Var {
        const GradientTape* owner = nullptr;
        std::size_t id = 0;
    };

    GradientTape() = default;
    GradientTape(const GradientTape&) = delete;
    GradientTape& operator=(const GradientTape&) = delete;

    Var constant(FeatureMap value);
    Var conv(Var input, const ConvFilter& filter, ParamKey key);
    Var relu(Var input);
    Var add(Var a, Var b);
    Var left_pad(Var input, std::size_t count);
    Var drop_leading(Var input, std::size_t count);
    Var scale(Var input, double factor);

    /// 1x1 sum over every entry.
    Var sum(Var input);
    /// 1x1 mean of |input(offset + i, 0) - targets[i]|; single-channel input.
    Var mean_abs_error(Var predictions, std::span<const double> targets, std::size_t offset);
    /// 1x1 sum of squared filter weights (biases excluded).
    Var squared_weights(const ConvFilter& filter, ParamKey key);

    const FeatureMap& value(Var v) const;
    double scalar(Var v) const;
    std::size_t size() const noexcept { return nodes_.size(); }

    /// Reverse sweep from a 1x1 node. Returns d(loss)/d(filter) for every
    /// filter recorded on the tape; the adjoints of all nodes stay available
    /// through adjoint() until the next call.
    Gradients backward(Var loss);
    const FeatureMap& adjoint(Var v) const;

private:
    enum class Kind { Constant, Conv, Relu, Add, LeftPad, DropLeading, Scale, Sum, MeanAbsError, SquaredWeights };

    struct Node {
        Node(Kind k, FeatureMap v) : kind(k), value(std::move(v)) {}

        Kind kind;
        FeatureMap value;
        std::size_t a = 0;
        std::size_t b = 0;
        std::size_t count = 0;
        double factor = 0.0;
        const ConvFilter* filter = nullptr;
        ParamKey key = 0;
        std::vector<double> targets;
    };

    std::size_t checked(Var v) const;
    Var push(Node node);

    std::vector<Node> nodes_;
    std::vector<FeatureMap> adjoints_;
};

} // namespace wavecast
