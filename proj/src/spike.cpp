#include "choicenet/spike.hpp"

#include "choicenet/label_field.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace choicenet {

namespace {

// Past 2^52 the products n*k stop being meaningful for centers in [0,1].
constexpr std::uint64_t kMaxResolution = std::uint64_t{1} << 52;

double factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= n; ++i)
        f *= i;
    return f;
}

}  // namespace

void SpikeSpec::validate() const
{
    if (center.size() < 1)
        throw ContractViolation("spike: center must have at least one coordinate");
    if (!in_unit_cube(center))
        throw ContractViolation("spike: center " + format_point(center) + " outside [0,1]^d");
    if (resolution < 1)
        throw ContractViolation("spike: resolution must be >= 1");
    if (!std::isfinite(residual))
        throw ContractViolation("spike: residual must be finite");
}

Network build_spike(const SpikeSpec& spec)
{
    spec.validate();
    using Layer = Network::Layer;
    const Eigen::Index d = spec.center.size();
    const double n = static_cast<double>(spec.resolution);

    std::vector<Layer::Triplet> first;
    Eigen::VectorXd first_bias(3 * d);
    std::vector<Layer::Triplet> second;
    for (Eigen::Index l = 0; l < d; ++l) {
        // The hat is even in t = n (x - k); the sign puts the side where all
        // three units are active on the shorter half of [0,1], keeping every
        // pre-activation below n in magnitude and exact on the 2^-53 grid.
        const double sign = spec.center[l] >= 0.5 ? 1.0 : -1.0;
        const double shift = -sign * (n * spec.center[l]);
        const Eigen::Index row = 3 * l;
        first.emplace_back(row, l, sign * n);
        first.emplace_back(row + 1, l, sign * n);
        first.emplace_back(row + 2, l, sign * n);
        first_bias[row] = shift - 1.0;
        first_bias[row + 1] = shift;
        first_bias[row + 2] = shift + 1.0;
        second.emplace_back(0, row, 1.0);
        second.emplace_back(0, row + 1, -2.0);
        second.emplace_back(0, row + 2, 1.0);
    }
    Eigen::VectorXd second_bias(1);
    second_bias[0] = -static_cast<double>(d - 1);
    Eigen::VectorXd out_bias = Eigen::VectorXd::Zero(1);

    // A zero residual still yields the (d, 3d, 1, 1) shape: the output row is
    // simply empty.
    std::vector<Layer::Triplet> out;
    if (spec.residual != 0.0)
        out.emplace_back(0, 0, spec.residual);

    std::vector<Layer> layers;
    layers.push_back(Layer::from_triplets(3 * d, d, first, first_bias));
    layers.push_back(Layer::from_triplets(1, 3 * d, second, second_bias));
    layers.push_back(Layer::from_triplets(1, 1, out, out_bias));
    return Network(d, std::move(layers));
}

double spike_l1_bound(double residual, std::uint64_t resolution, int dim)
{
    if (dim < 1)
        throw ContractViolation("spike_l1_bound: dimension must be positive");
    if (resolution < 1)
        throw ContractViolation("spike_l1_bound: resolution must be >= 1");
    const double n = static_cast<double>(resolution);
    return std::abs(residual) * std::pow(2.0 / n, dim) / factorial(dim + 1);
}

double spike_l1_bound(const SpikeSpec& spec)
{
    spec.validate();
    return spike_l1_bound(spec.residual, spec.resolution, static_cast<int>(spec.center.size()));
}

double min_linf_distance(const FiniteSet& points)
{
    const auto& pts = points.points();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            best = std::min(best, (pts[i] - pts[j]).cwiseAbs().maxCoeff());
    return best;
}

std::uint64_t select_resolution(const FiniteSet& points, std::span<const double> residuals, double epsilon)
{
    if (points.empty())
        throw ContractViolation("select_resolution: X is empty");
    if (!(epsilon > 0.0))
        throw ContractViolation("select_resolution: epsilon must be positive");
    if (residuals.size() != points.size())
        throw ContractViolation("select_resolution: " + std::to_string(residuals.size()) + " residuals for " +
                                std::to_string(points.size()) + " points");
    const int d = points.dim();
    const double per_spike = epsilon / (2.0 * static_cast<double>(points.size()));
    const double separation = points.size() >= 2 ? min_linf_distance(points) : 0.0;
    if (points.size() >= 2 && !(separation > 0.0))
        throw ContractViolation("select_resolution: X contains identical points");

    auto admissible = [&](std::uint64_t n) {
        for (double r : residuals)
            if (r != 0.0 && !(spike_l1_bound(r, n, d) < per_spike))
                return false;
        return points.size() < 2 || 2.0 / static_cast<double>(n) < separation;
    };

    std::uint64_t n = 1;
    while (!admissible(n)) {
        if (n >= kMaxResolution)
            throw ContractViolation("select_resolution: no admissible resolution up to 2^52");
        n *= 2;
    }
    return n;
}

}  // namespace choicenet
