#include "choicenet/base_approximator.hpp"

#include <map>
#include <utility>

namespace choicenet {

namespace {

using Layer = Network::Layer;
using Terms = std::vector<std::pair<Eigen::Index, double>>;

// Linear combination of the neurons of one layer plus a constant.
struct Form {
    Terms terms;
    double constant = 0.0;
};

Form operator-(const Form& b, const Form& a)
{
    Form out = b;
    for (const auto& [idx, w] : a.terms)
        out.terms.emplace_back(idx, -w);
    out.constant -= a.constant;
    return out;
}

// Accumulates one layer's neurons, merging identical pre-activations.
class LayerBuilder {
public:
    explicit LayerBuilder(Eigen::Index inputs) : inputs_(inputs) {}

    Eigen::Index neuron(Terms terms, double bias)
    {
        std::map<Eigen::Index, double> merged;
        for (const auto& [idx, w] : terms)
            merged[idx] += w;
        Terms canonical;
        for (const auto& [idx, w] : merged)
            if (w != 0.0)
                canonical.emplace_back(idx, w);
        auto key = std::make_pair(canonical, bias);
        if (auto it = index_.find(key); it != index_.end())
            return it->second;
        const auto row = static_cast<Eigen::Index>(bias_.size());
        for (const auto& [idx, w] : canonical)
            entries_.emplace_back(row, idx, w);
        bias_.push_back(bias);
        index_.emplace(std::move(key), row);
        return row;
    }

    Eigen::Index neuron(const Form& f) { return neuron(f.terms, f.constant); }

    Layer build() const
    {
        Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(bias_.data(), static_cast<Eigen::Index>(bias_.size()));
        return Layer::from_triplets(static_cast<Eigen::Index>(bias_.size()), inputs_, entries_, std::move(b));
    }

private:
    Eigen::Index inputs_;
    std::vector<Layer::Triplet> entries_;
    std::vector<double> bias_;
    std::map<std::pair<Terms, double>, Eigen::Index> index_;
};

Form single(Eigen::Index neuron) { return Form{{{neuron, 1.0}}, 0.0}; }

// One level of the pairwise max tree over nonnegative operands:
// max(a, b) = relu(a) + relu(b - a), and relu(a) = a carries a on one rail.
std::vector<Form> max_level(const std::vector<Form>& operands, LayerBuilder& layer)
{
    std::vector<Form> out;
    std::size_t i = 0;
    for (; i + 1 < operands.size(); i += 2) {
        const auto carry = layer.neuron(operands[i]);
        const auto excess = layer.neuron(operands[i + 1] - operands[i]);
        out.push_back(Form{{{carry, 1.0}, {excess, 1.0}}, 0.0});
    }
    if (i < operands.size())
        out.push_back(single(layer.neuron(operands[i])));
    return out;
}

struct GridNode {
    std::vector<std::uint64_t> index;
    double value;
};

std::vector<GridNode> grid_nodes(const BaseFunction& g, std::uint64_t cells)
{
    const int d = g.dim();
    std::vector<GridNode> nodes;
    std::vector<std::uint64_t> idx(static_cast<std::size_t>(d), 0);
    Point x(d);
    const double m = static_cast<double>(cells);
    while (true) {
        for (int i = 0; i < d; ++i)
            x[i] = static_cast<double>(idx[static_cast<std::size_t>(i)]) / m;
        const double v = g(x);
        if (!std::isfinite(v))
            throw ContractViolation("approximate: base \"" + g.name() + "\" is not finite at " + format_point(x));
        if (v != 0.0)
            nodes.push_back({idx, v});
        int axis = 0;
        while (axis < d && ++idx[static_cast<std::size_t>(axis)] > cells)
            idx[static_cast<std::size_t>(axis++)] = 0;
        if (axis == d)
            break;
    }
    return nodes;
}

Network compile_1d(const BaseFunction& g, std::uint64_t cells)
{
    const double m = static_cast<double>(cells);
    std::vector<double> values(cells + 1);
    Point x(1);
    for (std::uint64_t j = 0; j <= cells; ++j) {
        x[0] = static_cast<double>(j) / m;
        values[j] = g(x);
        if (!std::isfinite(values[j]))
            throw ContractViolation("approximate: base \"" + g.name() + "\" is not finite at " + format_point(x));
    }
    // f(x) = g_0 + sum_j w_j relu(m x - j) with w_0 = g_1 - g_0 and
    // w_j = g_{j+1} - 2 g_j + g_{j-1}.
    std::vector<Layer::Triplet> hidden;
    std::vector<Layer::Triplet> out;
    std::vector<double> hidden_bias;
    for (std::uint64_t j = 0; j < cells; ++j) {
        const double w = j == 0 ? values[1] - values[0] : (values[j + 1] - values[j]) - (values[j] - values[j - 1]);
        if (w == 0.0)
            continue;
        const auto row = static_cast<Eigen::Index>(hidden_bias.size());
        hidden.emplace_back(row, 0, m);
        hidden_bias.push_back(-static_cast<double>(j));
        out.emplace_back(0, row, w);
    }
    if (hidden_bias.empty()) {
        hidden.emplace_back(0, 0, m);
        hidden_bias.push_back(0.0);
    }
    const auto width = static_cast<Eigen::Index>(hidden_bias.size());
    Eigen::VectorXd hb = Eigen::Map<const Eigen::VectorXd>(hidden_bias.data(), width);
    Eigen::VectorXd ob = Eigen::VectorXd::Constant(1, values[0]);
    std::vector<Layer> layers;
    layers.push_back(Layer::from_triplets(width, 1, hidden, std::move(hb)));
    layers.push_back(Layer::from_triplets(1, width, out, std::move(ob)));
    return Network(1, std::move(layers));
}

Network compile_kuhn(const BaseFunction& g, std::uint64_t cells)
{
    const int d = g.dim();
    const double m = static_cast<double>(cells);
    const auto nodes = grid_nodes(g, cells);
    if (nodes.empty())
        return zero_network(d);

    // Shared first layer: relu(m x_i - j) and relu(j - m x_i).
    LayerBuilder first(d);
    std::vector<std::vector<Form>> pos(nodes.size());
    std::vector<std::vector<Form>> neg(nodes.size());
    for (std::size_t n = 0; n < nodes.size(); ++n)
        for (int i = 0; i < d; ++i) {
            const double j = static_cast<double>(nodes[n].index[static_cast<std::size_t>(i)]);
            pos[n].push_back(single(first.neuron({{i, m}}, -j)));
            neg[n].push_back(single(first.neuron({{i, -m}}, j)));
        }
    std::vector<Layer> layers{first.build()};

    while (pos.front().size() > 1) {
        LayerBuilder level(layers.back().out_dim());
        for (std::size_t n = 0; n < nodes.size(); ++n) {
            pos[n] = max_level(pos[n], level);
            neg[n] = max_level(neg[n], level);
        }
        layers.push_back(level.build());
    }

    LayerBuilder hats(layers.back().out_dim());
    std::vector<Layer::Triplet> out;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        const Form& p = pos[n].front();
        const Form& q = neg[n].front();
        Terms terms;
        for (const auto& [idx, w] : p.terms)
            terms.emplace_back(idx, -w);
        for (const auto& [idx, w] : q.terms)
            terms.emplace_back(idx, -w);
        const auto hat = hats.neuron(std::move(terms), 1.0 - p.constant - q.constant);
        out.emplace_back(0, hat, nodes[n].value);
    }
    layers.push_back(hats.build());
    layers.push_back(Layer::from_triplets(1, layers.back().out_dim(), out, Eigen::VectorXd::Zero(1)));
    return Network(d, std::move(layers));
}

void check_cells(std::uint64_t cells)
{
    if (cells == 0 || (cells & (cells - 1)) != 0)
        throw ContractViolation("compile_interpolant: cells must be a power of two, got " + std::to_string(cells));
}

}  // namespace

std::string to_string(ApproxStrategy s)
{
    switch (s) {
    case ApproxStrategy::hat_interp_1d:
        return "hat_interp_1d";
    case ApproxStrategy::simplicial_minmax:
        return "simplicial_minmax";
    case ApproxStrategy::zero:
        return "zero";
    }
    return "zero";
}

nlohmann::ordered_json ApproxCertificate::to_json() const
{
    auto steps = nlohmann::ordered_json::array();
    for (const auto& s : history)
        steps.push_back({{"grid_resolution", s.grid_resolution}, {"nodes", s.nodes}, {"estimate", s.estimate.to_json()}});
    return {{"budget", budget},
            {"strategy", to_string(strategy)},
            {"grid_resolution", grid_resolution},
            {"estimate", estimate.to_json()},
            {"history", std::move(steps)}};
}

Network compile_interpolant(const BaseFunction& g, std::uint64_t cells)
{
    check_cells(cells);
    return g.dim() == 1 ? compile_1d(g, cells) : compile_kuhn(g, cells);
}

std::size_t active_nodes(const BaseFunction& g, std::uint64_t cells)
{
    check_cells(cells);
    return grid_nodes(g, cells).size();
}

BaseApproximation approximate(const LabelField& field, double budget, const ApproxSettings& settings)
{
    if (!(budget > 0.0))
        throw ContractViolation("approximate: budget must be positive");
    if (!field.exceptions().empty())
        throw ContractViolation("approximate: field must be exception-free (pass the oracle representative)");

    ApproxCertificate cert;
    cert.budget = budget;
    if (!field.integrable()) {
        cert.strategy = ApproxStrategy::zero;
        cert.grid_resolution = 1;
        return {zero_network(field.dim()), cert};
    }

    const int d = field.dim();
    cert.strategy = d == 1 ? ApproxStrategy::hat_interp_1d : ApproxStrategy::simplicial_minmax;
    const BatchFunction target = as_batch(field);
    QuadratureSettings quad;
    quad.samples = settings.samples;
    quad.seed = settings.seed;

    std::uint64_t cells = 1;
    for (int r = 0; r <= settings.max_refinements; ++r, cells *= 2) {
        double total_nodes = 1.0;
        for (int i = 0; i < d; ++i)
            total_nodes *= static_cast<double>(cells + 1);
        if (total_nodes > static_cast<double>(settings.max_nodes))
            break;
        Network net = compile_interpolant(field.base(), cells);
        const auto est = l1_distance(as_batch(net), target, d, quad);
        cert.history.push_back({cells, static_cast<std::size_t>(total_nodes), est});
        if (est.upper_confidence < budget) {
            cert.estimate = est;
            cert.grid_resolution = cells;
            return {std::move(net), std::move(cert)};
        }
    }
    const auto& last = cert.history.empty() ? QuadratureEstimate{} : cert.history.back().estimate;
    const auto last_cells = cert.history.empty() ? 0 : cert.history.back().grid_resolution;
    throw ApproximationFailure("approximate: budget " + std::to_string(budget) + " not met; best estimate " +
                                   std::to_string(last.value) + " (upper " + std::to_string(last.upper_confidence) +
                                   ") at grid resolution " + std::to_string(last_cells),
                               last, last_cells);
}

}  // namespace choicenet
