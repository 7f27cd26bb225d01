#ifndef CHOICENET_SPIKE_HPP
#define CHOICENET_SPIKE_HPP

#include "choicenet/core.hpp"
#include "choicenet/relu_net.hpp"

#include <cstdint>
#include <span>

namespace choicenet {

class FiniteSet;

/// One compactly supported bump: peak value `residual` at `center`,
/// vanishing outside the l_inf box of radius 1/resolution.
struct SpikeSpec {
    Point center;
    double residual = 0.0;
    std::uint64_t resolution = 1;

    void validate() const;
};

/// The bump
///   r * relu( sum_l [ relu(n(x_l-k_l)-1) - 2 relu(n(x_l-k_l)) + relu(n(x_l-k_l)+1) ] - (d-1) )
/// as a network with widths (d, 3d, 1, 1).
Network build_spike(const SpikeSpec& spec);

/// |r| 2^d / (n^d (d+1)!): the exact integral over R^d, and an upper bound
/// for the integral over [0,1]^d.
double spike_l1_bound(const SpikeSpec& spec);
double spike_l1_bound(double residual, std::uint64_t resolution, int dim);

/// Smallest power of two n with
///   spike_l1_bound(r_k, n) < epsilon / (2|X|) for every r_k != 0, and
///   2/n < min pairwise l_inf distance of X   (when |X| >= 2).
/// `residuals[i]` belongs to `points.points()[i]`.
std::uint64_t select_resolution(const FiniteSet& points, std::span<const double> residuals, double epsilon);

/// Smallest pairwise l_inf distance; +inf for fewer than two points.
double min_linf_distance(const FiniteSet& points);

}  // namespace choicenet

#endif  // CHOICENET_SPIKE_HPP
