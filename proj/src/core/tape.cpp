#include "tape.hpp"

#include "error.hpp"

#include <cmath>
#include <string>

namespace wavecast {

const ConvFilter& Gradients::at(ParamKey key) const
{
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        fail(ErrorKind::Usage, "no gradient recorded for parameter " + std::to_string(key));
    }
    return it->second;
}

ConvFilter& Gradients::slot(ParamKey key, const ConvFilter& shape)
{
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        it = entries_.emplace(key, ConvFilter(shape.taps, shape.in_channels, shape.out_channels, shape.dilation)).first;
    }
    return it->second;
}

std::size_t GradientTape::checked(Var v) const
{
    if (v.owner != this || v.id >= nodes_.size()) {
        fail(ErrorKind::Usage, "node was not recorded on this tape");
    }
    return v.id;
}

GradientTape::Var GradientTape::push(Node node)
{
    nodes_.push_back(std::move(node));
    return Var{this, nodes_.size() - 1};
}

GradientTape::Var GradientTape::constant(FeatureMap value)
{
    return push(Node{Kind::Constant, std::move(value)});
}

GradientTape::Var GradientTape::conv(Var input, const ConvFilter& filter, ParamKey key)
{
    const std::size_t a = checked(input);
    Node node{Kind::Conv, causal_dilated_conv(nodes_[a].value, filter)};
    node.a = a;
    node.filter = &filter;
    node.key = key;
    return push(std::move(node));
}

GradientTape::Var GradientTape::relu(Var input)
{
    const std::size_t a = checked(input);
    Node node{Kind::Relu, wavecast::relu(nodes_[a].value)};
    node.a = a;
    return push(std::move(node));
}

GradientTape::Var GradientTape::add(Var lhs, Var rhs)
{
    const std::size_t a = checked(lhs);
    const std::size_t b = checked(rhs);
    Node node{Kind::Add, wavecast::add(nodes_[a].value, nodes_[b].value)};
    node.a = a;
    node.b = b;
    return push(std::move(node));
}

GradientTape::Var GradientTape::left_pad(Var input, std::size_t count)
{
    const std::size_t a = checked(input);
    Node node{Kind::LeftPad, left_pad_zeros(nodes_[a].value, count)};
    node.a = a;
    node.count = count;
    return push(std::move(node));
}

GradientTape::Var GradientTape::drop_leading(Var input, std::size_t count)
{
    const std::size_t a = checked(input);
    Node node{Kind::DropLeading, wavecast::drop_leading(nodes_[a].value, count)};
    node.a = a;
    node.count = count;
    return push(std::move(node));
}

GradientTape::Var GradientTape::scale(Var input, double factor)
{
    const std::size_t a = checked(input);
    const FeatureMap& src = nodes_[a].value;
    FeatureMap out(src.len(), src.channels());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = factor * src.data()[i];
    }
    check_finite(out.data(), "scale");
    Node node{Kind::Scale, std::move(out)};
    node.a = a;
    node.factor = factor;
    return push(std::move(node));
}

GradientTape::Var GradientTape::sum(Var input)
{
    const std::size_t a = checked(input);
    double total = 0.0;
    for (double v : nodes_[a].value.data()) {
        total += v;
    }
    Node node{Kind::Sum, FeatureMap(1, 1, {total})};
    node.a = a;
    return push(std::move(node));
}

GradientTape::Var GradientTape::mean_abs_error(Var predictions, std::span<const double> targets, std::size_t offset)
{
    const std::size_t a = checked(predictions);
    const FeatureMap& pred = nodes_[a].value;
    require(!targets.empty(), ErrorKind::Usage, "mean absolute error needs at least one target");
    require(pred.channels() == 1, ErrorKind::Config, "mean absolute error expects single-channel predictions");
    require(offset + targets.size() <= pred.len(), ErrorKind::Config,
            "targets extend past the end of the predictions");
    double total = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        total += std::abs(pred(offset + i, 0) - targets[i]);
    }
    Node node{Kind::MeanAbsError, FeatureMap(1, 1, {total / static_cast<double>(targets.size())})};
    node.a = a;
    node.count = offset;
    node.targets.assign(targets.begin(), targets.end());
    return push(std::move(node));
}

GradientTape::Var GradientTape::squared_weights(const ConvFilter& filter, ParamKey key)
{
    double total = 0.0;
    for (double w : filter.weights) {
        total += w * w;
    }
    Node node{Kind::SquaredWeights, FeatureMap(1, 1, {total})};
    node.filter = &filter;
    node.key = key;
    return push(std::move(node));
}

const FeatureMap& GradientTape::value(Var v) const
{
    return nodes_[checked(v)].value;
}

double GradientTape::scalar(Var v) const
{
    const FeatureMap& m = value(v);
    require(m.len() == 1 && m.channels() == 1, ErrorKind::Usage, "node is not a scalar");
    return m(0, 0);
}

const FeatureMap& GradientTape::adjoint(Var v) const
{
    const std::size_t id = checked(v);
    require(id < adjoints_.size(), ErrorKind::Usage, "backward has not reached this node");
    return adjoints_[id];
}

Gradients GradientTape::backward(Var loss)
{
    const std::size_t root = checked(loss);
    require(nodes_[root].value.size() == 1, ErrorKind::Usage, "backward needs a scalar loss");

    adjoints_.clear();
    adjoints_.reserve(nodes_.size());
    for (const Node& n : nodes_) {
        adjoints_.emplace_back(n.value.len(), n.value.channels());
    }

    Gradients grads;
    // Every filter on the tape gets an entry, including ones the loss does not reach.
    for (const Node& n : nodes_) {
        if (n.filter) {
            grads.slot(n.key, *n.filter);
        }
    }

    adjoints_[root](0, 0) = 1.0;
    for (std::size_t id = root + 1; id-- > 0;) {
        const Node& n = nodes_[id];
        const FeatureMap& g = adjoints_[id];
        switch (n.kind) {
        case Kind::Constant:
            break;
        case Kind::Conv:
            causal_dilated_conv_backward(nodes_[n.a].value, *n.filter, g, &adjoints_[n.a], &grads.slot(n.key, *n.filter));
            break;
        case Kind::Relu: {
            auto src = nodes_[n.a].value.data();
            auto dst = adjoints_[n.a].data();
            auto gd = g.data();
            for (std::size_t i = 0; i < gd.size(); ++i) {
                if (src[i] > 0.0) {
                    dst[i] += gd[i];
                }
            }
            break;
        }
        case Kind::Add: {
            auto gd = g.data();
            auto da = adjoints_[n.a].data();
            for (std::size_t i = 0; i < gd.size(); ++i) {
                da[i] += gd[i];
            }
            auto db = adjoints_[n.b].data();
            for (std::size_t i = 0; i < gd.size(); ++i) {
                db[i] += gd[i];
            }
            break;
        }
        case Kind::LeftPad: {
            auto gd = g.data();
            auto da = adjoints_[n.a].data();
            const std::size_t skip = n.count * g.channels();
            for (std::size_t i = 0; i < da.size(); ++i) {
                da[i] += gd[skip + i];
            }
            break;
        }
        case Kind::DropLeading: {
            auto gd = g.data();
            auto da = adjoints_[n.a].data();
            const std::size_t skip = n.count * g.channels();
            for (std::size_t i = 0; i < gd.size(); ++i) {
                da[skip + i] += gd[i];
            }
            break;
        }
        case Kind::Scale: {
            auto gd = g.data();
            auto da = adjoints_[n.a].data();
            for (std::size_t i = 0; i < gd.size(); ++i) {
                da[i] += n.factor * gd[i];
            }
            break;
        }
        case Kind::Sum: {
            const double seed = g(0, 0);
            for (double& d : adjoints_[n.a].data()) {
                d += seed;
            }
            break;
        }
        case Kind::MeanAbsError: {
            const FeatureMap& pred = nodes_[n.a].value;
            FeatureMap& dp = adjoints_[n.a];
            const double w = g(0, 0) / static_cast<double>(n.targets.size());
            for (std::size_t i = 0; i < n.targets.size(); ++i) {
                const double diff = pred(n.count + i, 0) - n.targets[i];
                if (diff > 0.0) {
                    dp(n.count + i, 0) += w;
                } else if (diff < 0.0) {
                    dp(n.count + i, 0) -= w;
                }
            }
            break;
        }
        case Kind::SquaredWeights: {
            ConvFilter& gf = grads.slot(n.key, *n.filter);
            const double seed = g(0, 0);
            for (std::size_t i = 0; i < gf.weights.size(); ++i) {
                gf.weights[i] += 2.0 * n.filter->weights[i] * seed;
            }
            break;
        }
        }
    }

    for (const Node& n : nodes_) {
        if (n.filter) {
            const ConvFilter& gf = grads.at(n.key);
            check_finite(gf.weights, "weight gradient");
            check_finite(gf.bias, "bias gradient");
        }
    }
    return grads;
}

} // namespace wavecast
