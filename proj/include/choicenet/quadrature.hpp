#ifndef CHOICENET_QUADRATURE_HPP
#define CHOICENET_QUADRATURE_HPP

#include "choicenet/core.hpp"
#include "choicenet/label_field.hpp"
#include "choicenet/relu_net.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace choicenet {

/// Evaluates a function at every column of a d x N point matrix.
using BatchFunction = std::function<Eigen::VectorXd(const PointMatrix&)>;

BatchFunction as_batch(const Network& net);  // keeps a copy of the network
BatchFunction as_batch(const LabelField& field);
BatchFunction as_batch(std::function<double(const Point&)> fn);

enum class QuadratureMethod { monte_carlo, grid };

std::string to_string(QuadratureMethod m);
QuadratureMethod quadrature_method_from_string(const std::string& name);

struct QuadratureSettings {
    QuadratureMethod method = QuadratureMethod::monte_carlo;
    /// Monte Carlo: number of points. Grid: points per axis.
    std::uint64_t samples = 200000;
    std::uint64_t seed = 0;
    double grid_bound_factor = 0.05;
};

struct QuadratureEstimate {
    double value = 0.0;
    double standard_error = 0.0;
    std::uint64_t samples = 0;
    QuadratureMethod method = QuadratureMethod::monte_carlo;
    /// value + 4 stderr (Monte Carlo) or value (1 + grid_bound_factor) (grid).
    double upper_confidence = 0.0;

    nlohmann::ordered_json to_json() const;
};

/// A NaN appeared in one of the integrands.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, Point point) : std::runtime_error(what), point_(std::move(point)) {}
    const Point& point() const { return point_; }

private:
    Point point_;
};

class UnsupportedMethod : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr double kConfidenceSigmas = 4.0;

/// Estimates the L1 distance between `a` and `b` over [0,1]^dim.
QuadratureEstimate l1_distance(const BatchFunction& a, const BatchFunction& b, int dim,
                               const QuadratureSettings& settings);

/// Sum with a fixed pairwise reduction tree over the index order.
double pairwise_sum(std::span<const double> values);

}  // namespace choicenet

#endif  // CHOICENET_QUADRATURE_HPP
