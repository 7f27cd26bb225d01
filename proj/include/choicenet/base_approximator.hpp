#ifndef CHOICENET_BASE_APPROXIMATOR_HPP
#define CHOICENET_BASE_APPROXIMATOR_HPP

#include "choicenet/label_field.hpp"
#include "choicenet/quadrature.hpp"
#include "choicenet/relu_net.hpp"

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace choicenet {

enum class ApproxStrategy { hat_interp_1d, simplicial_minmax, zero };

std::string to_string(ApproxStrategy s);

struct ApproxSettings {
    std::uint64_t samples = std::uint64_t{1} << 18;  // Monte Carlo points per certificate
    std::uint64_t seed = 0;
    int max_refinements = 12;
    std::uint64_t max_nodes = 200000;
};

struct RefinementStep {
    std::uint64_t grid_resolution;
    std::size_t nodes;
    QuadratureEstimate estimate;
};

struct ApproxCertificate {
    double budget = 0.0;
    QuadratureEstimate estimate;
    std::uint64_t grid_resolution = 1;
    ApproxStrategy strategy = ApproxStrategy::zero;
    std::vector<RefinementStep> history;

    nlohmann::ordered_json to_json() const;
};

struct BaseApproximation {
    Network network;
    ApproxCertificate certificate;
};

class ApproximationFailure : public std::runtime_error {
public:
    ApproximationFailure(const std::string& what, QuadratureEstimate achieved, std::uint64_t grid_resolution)
        : std::runtime_error(what), achieved_(achieved), grid_resolution_(grid_resolution)
    {
    }
    const QuadratureEstimate& achieved() const { return achieved_; }
    std::uint64_t grid_resolution() const { return grid_resolution_; }

private:
    QuadratureEstimate achieved_;
    std::uint64_t grid_resolution_;
};

/// Continuous piecewise-linear interpolant of `g` on the uniform grid with
/// `cells` cells per axis, compiled exactly into a ReLU network.
///
/// d = 1: one hidden layer, relu(m x - j) with second-difference weights.
/// d >= 2: Kuhn (Freudenthal) triangulation. The interpolant is the sum of
/// nodal hats  g(v/m) relu(1 - max(0, max_i y_i) - max(0, max_i -y_i)),
/// y = m x - v, with each max built from pairwise max(a,b) = a + relu(b - a).
/// Zero-valued nodes are skipped. `cells` must be a power of two so grid
/// nodes are exact dyadics.
Network compile_interpolant(const BaseFunction& g, std::uint64_t cells);

/// Number of grid nodes with non-zero value (the hats actually emitted).
std::size_t active_nodes(const BaseFunction& g, std::uint64_t cells);

/// A network within `budget` of the field's base in L1, certified by Monte
/// Carlo (upper confidence < budget). Non-integrable fields get the zero
/// network. The field must have no exceptions.
BaseApproximation approximate(const LabelField& field, double budget, const ApproxSettings& settings = {});

}  // namespace choicenet

#endif  // CHOICENET_BASE_APPROXIMATOR_HPP
