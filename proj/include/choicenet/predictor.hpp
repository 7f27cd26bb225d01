#ifndef CHOICENET_PREDICTOR_HPP
#define CHOICENET_PREDICTOR_HPP

// The network-valued learner: from a masked label field and the set X it
// hides, build
//     network = Phi_eps + sum_{k in X} spike(k, r_k, n*),
// where Phi_eps approximates the oracle representative g in L1 and
// r_k = g(k) - Phi_eps(k), so that network(k) = g(k) on X.

#include "choicenet/base_approximator.hpp"
#include "choicenet/choice_oracle.hpp"
#include "choicenet/label_field.hpp"
#include "choicenet/relu_net.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace choicenet {

struct BudgetSplit {
    double base_fraction = 0.4;
    double spike_fraction = 0.4;
    double slack = 0.2;
};

struct PredictorConfig {
    double epsilon = 0.1;
    BudgetSplit split;
    OracleKind oracle;
    ApproxSettings approx;

    void validate() const;
};

/// Marker for an infinite X; the learner then returns the zero network.
struct InfiniteSet {
    int dim;
};

struct PointPrediction {
    Point point;
    double predicted;
    double hidden_truth;  // NaN until audit()
    double abs_error;     // NaN until audit()
};

struct PredictionOutcome {
    Network network;
    std::vector<std::pair<Point, double>> residuals;
    std::optional<std::uint64_t> n_star;
    ApproxCertificate certificate;
    std::vector<PointPrediction> per_point;
    std::size_t spike_count = 0;
};

/// Tolerance of the exactness check on X: 1e-9 max(1, |y|).
inline constexpr double kExactnessTolerance = 1e-9;
bool exact_on_point(double predicted, double truth);

/// Memoizes approximate() by (base id, integrable, budget, settings); the
/// cached value is a pure function of its key.
class ApproximationCache {
public:
    BaseApproximation get(const LabelField& representative, double budget, const ApproxSettings& settings);

private:
    std::mutex mutex_;
    std::map<std::string, std::shared_ptr<const BaseApproximation>> entries_;
};

PredictionOutcome fit(const FiniteSet& x, const LabelField& masked, const PredictorConfig& cfg,
                      ApproximationCache* cache = nullptr);
PredictionOutcome fit(const InfiniteSet& x, const LabelField& masked, const PredictorConfig& cfg);

/// Fills hidden_truth and abs_error from the unmasked field.
void audit(PredictionOutcome& outcome, const LabelField& truth);

/// The label-valued wrapper: network values (clamped to [0,1]) on X, the
/// masked field elsewhere.
class PredictedLabels {
public:
    PredictedLabels(FiniteSet x, LabelField masked, Network network);

    double operator()(const Point& j) const;
    const Network& network() const { return network_; }

private:
    FiniteSet x_;
    LabelField masked_;
    Network network_;
};

PredictedLabels predict_labels(const FiniteSet& x, const LabelField& masked, const PredictorConfig& cfg,
                               ApproximationCache* cache = nullptr);

}  // namespace choicenet

#endif  // CHOICENET_PREDICTOR_HPP
