#ifndef CHOICENET_RELU_NET_HPP
#define CHOICENET_RELU_NET_HPP

// Feed-forward ReLU networks x -> T_L(relu(T_{L-1}(... relu(T_1(x))))) on [0,1]^d.
//
// Layers hold their weights in row-major sparse storage. The networks built
// here (hat sums, block-diagonal sums of spikes) are mostly zeros, and the
// evaluator walks only the stored entries. Summation of networks is exact: it
// produces one literal network, not a wrapper around several.

#include "choicenet/core.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace choicenet {

template <typename Scalar>
class AffineLayer {
public:
    using Weights = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;
    using Bias = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using DenseWeights = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Triplet = Eigen::Triplet<Scalar>;

    AffineLayer(Weights weights, Bias bias) : weights_(std::move(weights)), bias_(std::move(bias))
    {
        if (weights_.rows() != bias_.size())
            throw ContractViolation("affine layer: weight rows (" + std::to_string(weights_.rows()) +
                                    ") != bias length (" + std::to_string(bias_.size()) + ")");
        if (weights_.rows() == 0 || weights_.cols() == 0)
            throw ContractViolation("affine layer: empty weight matrix");
        weights_.prune([](Eigen::Index, Eigen::Index, const Scalar& v) { return v != Scalar(0); });
        weights_.makeCompressed();
        for (Eigen::Index k = 0; k < weights_.nonZeros(); ++k)
            if (!std::isfinite(weights_.valuePtr()[k]))
                throw ContractViolation("affine layer: non-finite weight");
        if (!bias_.allFinite())
            throw ContractViolation("affine layer: non-finite bias");
    }

    static AffineLayer from_dense(const DenseWeights& weights, Bias bias)
    {
        return AffineLayer(weights.sparseView(), std::move(bias));
    }

    static AffineLayer from_triplets(Eigen::Index rows, Eigen::Index cols, const std::vector<Triplet>& entries,
                                     Bias bias)
    {
        Weights w(rows, cols);
        w.setFromTriplets(entries.begin(), entries.end());
        return AffineLayer(std::move(w), std::move(bias));
    }

    Eigen::Index in_dim() const { return weights_.cols(); }
    Eigen::Index out_dim() const { return weights_.rows(); }
    const Weights& weights() const { return weights_; }
    const Bias& bias() const { return bias_; }
    DenseWeights dense_weights() const { return DenseWeights(weights_); }

    /// Row-major activations (features x batch). Accumulates W*in in stored
    /// column order starting from zero, then adds the bias.
    template <typename In, typename Out>
    void apply(const In& in, Out& out) const
    {
        out.resize(out_dim(), in.cols());
        for (Eigen::Index row = 0; row < out_dim(); ++row) {
            auto dst = out.row(row);
            dst.setZero();
            for (typename Weights::InnerIterator it(weights_, row); it; ++it)
                dst += it.value() * in.row(it.col());
            dst += bias_[row];
        }
    }

    friend bool operator==(const AffineLayer& a, const AffineLayer& b)
    {
        return a.out_dim() == b.out_dim() && a.in_dim() == b.in_dim() && a.bias_ == b.bias_ &&
               a.dense_weights() == b.dense_weights();
    }

private:
    Weights weights_;
    Bias bias_;
};

template <typename Scalar>
class ReluNetwork {
public:
    using Layer = AffineLayer<Scalar>;

    ReluNetwork(Eigen::Index input_dim, std::vector<Layer> layers) : input_dim_(input_dim), layers_(std::move(layers))
    {
        if (input_dim_ < 1)
            throw ContractViolation("relu network: input_dim must be positive");
        if (layers_.empty())
            throw ContractViolation("relu network: needs at least one layer");
        Eigen::Index width = input_dim_;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            if (layers_[i].in_dim() != width)
                throw ContractViolation("relu network: layer " + std::to_string(i) + " expects width " +
                                        std::to_string(layers_[i].in_dim()) + ", previous width is " +
                                        std::to_string(width));
            width = layers_[i].out_dim();
        }
        if (width != 1)
            throw ContractViolation("relu network: output width must be 1, got " + std::to_string(width));
    }

    Eigen::Index input_dim() const { return input_dim_; }
    std::size_t depth() const { return layers_.size(); }
    const std::vector<Layer>& layers() const { return layers_; }

    /// N_0, ..., N_L.
    std::vector<Eigen::Index> widths() const
    {
        std::vector<Eigen::Index> w{input_dim_};
        for (const auto& layer : layers_)
            w.push_back(layer.out_dim());
        return w;
    }

    Eigen::Index parameter_count() const
    {
        Eigen::Index n = 0;
        for (const auto& layer : layers_)
            n += layer.weights().nonZeros() + layer.out_dim();
        return n;
    }

    friend bool operator==(const ReluNetwork& a, const ReluNetwork& b)
    {
        return a.input_dim_ == b.input_dim_ && a.layers_ == b.layers_;
    }

private:
    Eigen::Index input_dim_;
    std::vector<Layer> layers_;
};

using Network = ReluNetwork<double>;

namespace detail {

template <typename Derived>
void check_domain(Eigen::Index input_dim, const Eigen::MatrixBase<Derived>& points)
{
    if (points.rows() != input_dim)
        throw ContractViolation("evaluate: point dimension " + std::to_string(points.rows()) +
                                " != network input_dim " + std::to_string(input_dim));
    for (Eigen::Index c = 0; c < points.cols(); ++c)
        for (Eigen::Index r = 0; r < points.rows(); ++r) {
            const auto v = points(r, c);
            if (!(v >= 0 && v <= 1))
                throw ContractViolation("evaluate: point outside [0,1]^d (coordinate " + std::to_string(r) +
                                        " = " + std::to_string(static_cast<double>(v)) + ")");
        }
}

template <typename Scalar>
using Activations = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace detail

/// Evaluates the network at every column of `points`.
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> evaluate_batch(const ReluNetwork<Scalar>& net,
                                                        const Eigen::MatrixBase<Derived>& points)
{
    detail::check_domain(net.input_dim(), points);
    detail::Activations<Scalar> current = points.template cast<Scalar>().array();
    detail::Activations<Scalar> next;
    const auto& layers = net.layers();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        layers[i].apply(current, next);
        if (i + 1 < layers.size())
            next = next.max(Scalar(0));
        std::swap(current, next);
    }
    return current.row(0).transpose().matrix();
}

template <typename Scalar, typename Derived>
Scalar evaluate(const ReluNetwork<Scalar>& net, const Eigen::MatrixBase<Derived>& x)
{
    if (x.cols() != 1)
        throw ContractViolation("evaluate: expected a single point");
    return evaluate_batch(net, x)(0);
}

/// The constant-zero function as a single affine layer.
template <typename Scalar = double>
ReluNetwork<Scalar> zero_network(Eigen::Index input_dim)
{
    using Layer = AffineLayer<Scalar>;
    typename Layer::Weights w(1, input_dim);
    return ReluNetwork<Scalar>(input_dim, {Layer(std::move(w), Layer::Bias::Zero(1))});
}

/// Multiplies the output layer by `factor`.
template <typename Scalar>
ReluNetwork<Scalar> scale_output(const ReluNetwork<Scalar>& net, Scalar factor)
{
    auto layers = net.layers();
    const auto& last = layers.back();
    typename AffineLayer<Scalar>::Weights w = last.weights() * factor;
    layers.back() = AffineLayer<Scalar>(std::move(w), last.bias() * factor);
    return ReluNetwork<Scalar>(net.input_dim(), std::move(layers));
}

/// Extends a network to `target_depth` layers without changing its values.
///
/// The output v of the last layer is split into the rails (relu(v), relu(-v)),
/// carried through 2x2 identity layers, and recombined as relu(v) - relu(-v).
template <typename Scalar>
ReluNetwork<Scalar> pad_to_depth(const ReluNetwork<Scalar>& net, std::size_t target_depth)
{
    using Layer = AffineLayer<Scalar>;
    using Triplet = typename Layer::Triplet;
    if (target_depth < net.depth())
        throw ContractViolation("pad_to_depth: target depth " + std::to_string(target_depth) +
                                " is below current depth " + std::to_string(net.depth()));
    if (target_depth == net.depth())
        return net;

    std::vector<Layer> layers(net.layers().begin(), net.layers().end() - 1);
    const Layer& last = net.layers().back();

    std::vector<Triplet> split;
    for (typename Layer::Weights::InnerIterator it(last.weights(), 0); it; ++it) {
        split.emplace_back(0, it.col(), it.value());
        split.emplace_back(1, it.col(), -it.value());
    }
    typename Layer::Bias split_bias(2);
    split_bias << last.bias()[0], -last.bias()[0];
    layers.push_back(Layer::from_triplets(2, last.in_dim(), split, split_bias));

    const std::vector<Triplet> carry{{0, 0, Scalar(1)}, {1, 1, Scalar(1)}};
    for (std::size_t i = net.depth() + 1; i < target_depth; ++i)
        layers.push_back(Layer::from_triplets(2, 2, carry, Layer::Bias::Zero(2)));

    const std::vector<Triplet> merge{{0, 0, Scalar(1)}, {0, 1, Scalar(-1)}};
    layers.push_back(Layer::from_triplets(1, 2, merge, Layer::Bias::Zero(1)));
    return ReluNetwork<Scalar>(net.input_dim(), std::move(layers));
}

/// One network computing the pointwise sum of `nets`.
///
/// Nets are first padded to the common depth; the first layers are stacked
/// (they share the input), hidden layers are placed block-diagonally, and the
/// output rows are concatenated with summed biases.
template <typename Scalar>
ReluNetwork<Scalar> sum_networks(std::span<const ReluNetwork<Scalar>> nets)
{
    using Layer = AffineLayer<Scalar>;
    using Triplet = typename Layer::Triplet;
    if (nets.empty())
        throw ContractViolation("sum_networks: empty list");
    const Eigen::Index d = nets.front().input_dim();
    std::size_t depth = 0;
    for (const auto& n : nets) {
        if (n.input_dim() != d)
            throw ContractViolation("sum_networks: mismatched input_dim");
        depth = std::max(depth, n.depth());
    }

    std::vector<ReluNetwork<Scalar>> padded;
    padded.reserve(nets.size());
    for (const auto& n : nets)
        padded.push_back(pad_to_depth(n, depth));

    std::vector<Layer> layers;
    for (std::size_t l = 0; l < depth; ++l) {
        const bool first = l == 0;
        const bool last = l + 1 == depth;
        Eigen::Index rows = 0;
        Eigen::Index cols = 0;
        for (const auto& n : padded) {
            rows += last ? 0 : n.layers()[l].out_dim();
            cols += first ? 0 : n.layers()[l].in_dim();
        }
        if (last)
            rows = 1;
        if (first)
            cols = d;

        std::vector<Triplet> entries;
        typename Layer::Bias bias = Layer::Bias::Zero(rows);
        Eigen::Index row_off = 0;
        Eigen::Index col_off = 0;
        for (const auto& n : padded) {
            const Layer& layer = n.layers()[l];
            for (Eigen::Index r = 0; r < layer.out_dim(); ++r)
                for (typename Layer::Weights::InnerIterator it(layer.weights(), r); it; ++it)
                    entries.emplace_back(row_off + r, col_off + it.col(), it.value());
            if (last)
                bias[0] += layer.bias()[0];
            else
                bias.segment(row_off, layer.out_dim()) = layer.bias();
            if (!last)
                row_off += layer.out_dim();
            if (!first)
                col_off += layer.in_dim();
        }
        layers.push_back(Layer::from_triplets(rows, cols, entries, bias));
    }
    return ReluNetwork<Scalar>(d, std::move(layers));
}

template <typename Scalar>
ReluNetwork<Scalar> sum_networks(const std::vector<ReluNetwork<Scalar>>& nets)
{
    return sum_networks(std::span<const ReluNetwork<Scalar>>(nets));
}

}  // namespace choicenet

#endif  // CHOICENET_RELU_NET_HPP
