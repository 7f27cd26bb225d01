#include "choicenet/sampler.hpp"

#include <charconv>
#include <cmath>
#include <random>

namespace choicenet {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double parse_double(std::string_view s, std::string_view what)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ContractViolation("size distribution: cannot parse " + std::string(what) + " from \"" +
                                std::string(s) + "\"");
    return v;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed + kGolden) ^ mix64(mix64(stream) + 0x632be59bd9b4e019ULL))
{
}

CounterRng::result_type CounterRng::operator()() { return mix64(key_ + kGolden * ++counter_); }

double CounterRng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

Point CounterRng::uniform_point(int dim)
{
    Point p(dim);
    for (int i = 0; i < dim; ++i)
        p[i] = uniform();
    return p;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) { return mix64(mix64(seed) ^ (salt * kGolden)); }

SizeDistribution SizeDistribution::fixed(std::uint64_t k) { return {Kind::fixed, static_cast<double>(k)}; }

SizeDistribution SizeDistribution::poisson(double mean)
{
    if (!(mean > 0.0) || !std::isfinite(mean))
        throw ContractViolation("poisson size distribution: mean must be positive");
    return {Kind::poisson, mean};
}

SizeDistribution SizeDistribution::geometric(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw ContractViolation("geometric size distribution: p must lie in (0,1)");
    return {Kind::geometric, p};
}

SizeDistribution SizeDistribution::parse(std::string_view text)
{
    const auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw ContractViolation("size distribution: expected kind:value, got \"" + std::string(text) + "\"");
    const auto kind = text.substr(0, colon);
    const auto value = text.substr(colon + 1);
    if (kind == "fixed") {
        const double k = parse_double(value, "k");
        if (k < 0 || k != std::floor(k))
            throw ContractViolation("fixed size distribution: k must be a non-negative integer");
        return fixed(static_cast<std::uint64_t>(k));
    }
    if (kind == "poisson")
        return poisson(parse_double(value, "mean"));
    if (kind == "geometric")
        return geometric(parse_double(value, "p"));
    throw ContractViolation("size distribution: unknown kind \"" + std::string(kind) + "\"");
}

SizeDistribution SizeDistribution::from_json(const nlohmann::json& doc, const std::string& pointer)
{
    if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string())
        throw ContractViolation(pointer + ": expected {\"kind\": \"fixed\"|\"poisson\"|\"geometric\", ...}");
    const auto kind = doc["kind"].get<std::string>();
    auto number = [&](const char* key) {
        if (!doc.contains(key) || !doc[key].is_number())
            throw ContractViolation(pointer + "/" + key + ": expected a number");
        return doc[key].get<double>();
    };
    try {
        if (kind == "fixed") {
            const double k = number("k");
            if (k < 0 || k != std::floor(k))
                throw ContractViolation("k must be a non-negative integer");
            return fixed(static_cast<std::uint64_t>(k));
        }
        if (kind == "poisson")
            return poisson(number("mean"));
        if (kind == "geometric")
            return geometric(number("p"));
    } catch (const ContractViolation& e) {
        throw ContractViolation(pointer + ": " + e.what());
    }
    throw ContractViolation(pointer + "/kind: unknown kind \"" + kind + "\"");
}

nlohmann::ordered_json SizeDistribution::to_json() const
{
    switch (kind_) {
    case Kind::fixed:
        return {{"kind", "fixed"}, {"k", static_cast<std::uint64_t>(parameter_)}};
    case Kind::poisson:
        return {{"kind", "poisson"}, {"mean", parameter_}};
    case Kind::geometric:
        return {{"kind", "geometric"}, {"p", parameter_}};
    }
    return {};
}

double SizeDistribution::mean() const
{
    switch (kind_) {
    case Kind::fixed:
    case Kind::poisson:
        return parameter_;
    case Kind::geometric:
        return (1.0 - parameter_) / parameter_;
    }
    return 0.0;
}

double SizeDistribution::probability(std::uint64_t k) const
{
    const double kd = static_cast<double>(k);
    switch (kind_) {
    case Kind::fixed:
        return kd == parameter_ ? 1.0 : 0.0;
    case Kind::poisson:
        return std::exp(kd * std::log(parameter_) - parameter_ - std::lgamma(kd + 1.0));
    case Kind::geometric:
        return parameter_ * std::pow(1.0 - parameter_, kd);
    }
    return 0.0;
}

std::uint64_t SizeDistribution::draw(CounterRng& rng) const
{
    switch (kind_) {
    case Kind::fixed:
        return static_cast<std::uint64_t>(parameter_);
    case Kind::poisson:
        return std::poisson_distribution<std::uint64_t>(parameter_)(rng);
    case Kind::geometric:
        return std::geometric_distribution<std::uint64_t>(parameter_)(rng);
    }
    return 0;
}

FiniteSet sample_finite_set(const SizeDistribution& dist, int dim, std::uint64_t seed, std::uint64_t stream)
{
    if (dim < 1)
        throw ContractViolation("sample_finite_set: dimension must be positive");
    CounterRng rng(seed, stream);
    const std::uint64_t k = dist.draw(rng);
    std::vector<Point> draws;
    draws.reserve(k);
    for (std::uint64_t i = 0; i < k; ++i)
        draws.push_back(rng.uniform_point(dim));
    return FiniteSet::from_samples(dim, draws);
}

IntersectionLog intersection_trials(const SizeDistribution& dist, int dim, const FiniteSet& target,
                                    std::uint64_t trials, std::uint64_t seed)
{
    if (trials < 1)
        throw ContractViolation("intersection_trials: trials must be >= 1");
    if (!target.empty() && target.dim() != dim)
        throw ContractViolation("intersection_trials: target dimension differs");
    IntersectionLog log;
    log.trials = trials;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const FiniteSet x = sample_finite_set(dist, dim, seed, t);
        bool hit = false;
        for (const auto& p : x.points())
            if (target.contains(p)) {
                hit = true;
                log.events.push_back({t, p});
            }
        if (hit)
            ++log.hits;
    }
    return log;
}

}  // namespace choicenet
