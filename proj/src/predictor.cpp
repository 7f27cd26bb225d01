#include "choicenet/predictor.hpp"

#include "choicenet/spike.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace choicenet {

void PredictorConfig::validate() const
{
    if (!(epsilon > 0.0))
        throw ContractViolation("predictor: epsilon must be positive");
    if (!(split.base_fraction > 0.0 && split.spike_fraction > 0.0 && split.slack > 0.0))
        throw ContractViolation("predictor: budget fractions must be positive");
    if (std::abs(split.base_fraction + split.spike_fraction + split.slack - 1.0) > 1e-12)
        throw ContractViolation("predictor: budget fractions must sum to 1");
}

bool exact_on_point(double predicted, double truth)
{
    return std::abs(predicted - truth) <= kExactnessTolerance * std::max(1.0, std::abs(truth));
}

BaseApproximation ApproximationCache::get(const LabelField& representative, double budget,
                                          const ApproxSettings& settings)
{
    const std::string key = representative.base().id() + (representative.integrable() ? "|i|" : "|n|") +
                            std::to_string(std::bit_cast<std::uint64_t>(budget)) + "|" +
                            std::to_string(settings.samples) + "|" + std::to_string(settings.seed) + "|" +
                            std::to_string(settings.max_refinements) + "|" + std::to_string(settings.max_nodes);
    {
        std::lock_guard lock(mutex_);
        if (auto it = entries_.find(key); it != entries_.end())
            return *it->second;
    }
    auto value = std::make_shared<const BaseApproximation>(approximate(representative, budget, settings));
    std::lock_guard lock(mutex_);
    return *entries_.emplace(key, std::move(value)).first->second;
}

PredictionOutcome fit(const FiniteSet& x, const LabelField& masked, const PredictorConfig& cfg,
                      ApproximationCache* cache)
{
    cfg.validate();
    if (!x.empty() && x.dim() != masked.dim())
        throw ContractViolation("fit: X and field dimensions differ");

    const LabelField g = representative(cfg.oracle, masked);
    const LabelField smooth = g.without_exceptions();
    const double base_budget = cfg.split.base_fraction * cfg.epsilon;
    BaseApproximation base =
        cache ? cache->get(smooth, base_budget, cfg.approx) : approximate(smooth, base_budget, cfg.approx);

    PredictionOutcome outcome{base.network, {}, std::nullopt, std::move(base.certificate), {}, 0};
    if (x.empty())
        return outcome;

    std::vector<double> residuals;
    residuals.reserve(x.size());
    for (const auto& k : x.points()) {
        const double r = g.value_at(k) - evaluate(base.network, k);
        residuals.push_back(r);
        outcome.residuals.emplace_back(k, r);
    }

    std::vector<Network> summands{base.network};
    if (std::any_of(residuals.begin(), residuals.end(), [](double r) { return r != 0.0; })) {
        // select_resolution bounds each spike by eps'/(2|X|); eps' = 2 * spike
        // budget keeps the whole spike sum under spike_fraction * epsilon.
        const std::uint64_t n = select_resolution(x, residuals, 2.0 * cfg.split.spike_fraction * cfg.epsilon);
        outcome.n_star = n;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (residuals[i] != 0.0)
                summands.push_back(build_spike({x.points()[i], residuals[i], n}));
    }
    outcome.spike_count = summands.size() - 1;
    outcome.network = summands.size() == 1 ? summands.front() : sum_networks(summands);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& k : x.points())
        outcome.per_point.push_back({k, evaluate(outcome.network, k), nan, nan});
    return outcome;
}

PredictionOutcome fit(const InfiniteSet& x, const LabelField& masked, const PredictorConfig& cfg)
{
    cfg.validate();
    if (x.dim != masked.dim())
        throw ContractViolation("fit: X and field dimensions differ");
    ApproxCertificate cert;
    cert.budget = cfg.split.base_fraction * cfg.epsilon;
    cert.strategy = ApproxStrategy::zero;
    return {zero_network(x.dim), {}, std::nullopt, cert, {}, 0};
}

void audit(PredictionOutcome& outcome, const LabelField& truth)
{
    for (auto& p : outcome.per_point) {
        p.hidden_truth = truth.value_at(p.point);
        p.abs_error = std::abs(p.predicted - p.hidden_truth);
    }
}

PredictedLabels::PredictedLabels(FiniteSet x, LabelField masked, Network network)
    : x_(std::move(x)), masked_(std::move(masked)), network_(std::move(network))
{
}

double PredictedLabels::operator()(const Point& j) const
{
    if (x_.contains(j))
        return std::clamp(evaluate(network_, j), 0.0, 1.0);
    return masked_.value_at(j);
}

PredictedLabels predict_labels(const FiniteSet& x, const LabelField& masked, const PredictorConfig& cfg,
                               ApproximationCache* cache)
{
    auto outcome = fit(x, masked, cfg, cache);
    return PredictedLabels(x, masked, std::move(outcome.network));
}

}  // namespace choicenet
