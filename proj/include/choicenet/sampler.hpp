#ifndef CHOICENET_SAMPLER_HPP
#define CHOICENET_SAMPLER_HPP

#include "choicenet/label_field.hpp"

#include <json.hpp>

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace choicenet {

/// Counter-based generator: the i-th output of stream (seed, stream) is a
/// fixed hash of (seed, stream, i), so any trial can be replayed on its own.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

    /// Uniform 53-bit dyadic rational in [0, 1).
    double uniform();
    Point uniform_point(int dim);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

/// The law of |X| before duplicate collapse.
class SizeDistribution {
public:
    enum class Kind { fixed, poisson, geometric };

    static SizeDistribution fixed(std::uint64_t k);
    static SizeDistribution poisson(double mean);
    /// Failures before the first success: support {0, 1, ...}, mean (1-p)/p.
    static SizeDistribution geometric(double p);

    /// "fixed:5", "poisson:3", "geometric:0.25".
    static SizeDistribution parse(std::string_view text);
    /// {"kind": "poisson", "mean": 3} | {"kind": "fixed", "k": 5} | {"kind": "geometric", "p": 0.25}
    static SizeDistribution from_json(const nlohmann::json& doc, const std::string& pointer = "/nu");
    nlohmann::ordered_json to_json() const;

    Kind kind() const { return kind_; }
    double parameter() const { return parameter_; }
    double mean() const;
    /// P(|X| = k) before collapse.
    double probability(std::uint64_t k) const;

    std::uint64_t draw(CounterRng& rng) const;

private:
    SizeDistribution(Kind kind, double parameter) : kind_(kind), parameter_(parameter) {}
    Kind kind_;
    double parameter_;
};

/// Draw k ~ nu, then k i.i.d. uniform points; duplicates collapse.
FiniteSet sample_finite_set(const SizeDistribution& dist, int dim, std::uint64_t seed, std::uint64_t stream = 0);

struct IntersectionHit {
    std::uint64_t trial;
    Point point;
};

struct IntersectionLog {
    std::uint64_t trials = 0;
    std::uint64_t hits = 0;  // number of trials whose set met the target
    std::vector<IntersectionHit> events;
};

/// Samples `trials` sets (stream = trial index) and logs every exact hit on
/// `target`.
IntersectionLog intersection_trials(const SizeDistribution& dist, int dim, const FiniteSet& target,
                                    std::uint64_t trials, std::uint64_t seed);

}  // namespace choicenet

#endif  // CHOICENET_SAMPLER_HPP
