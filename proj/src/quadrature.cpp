#include "choicenet/quadrature.hpp"

#include "choicenet/sampler.hpp"

#include <cmath>
#include <vector>

namespace choicenet {

namespace {

constexpr Eigen::Index kBatch = 4096;

void absolute_differences(const BatchFunction& a, const BatchFunction& b, const PointMatrix& pts,
                          std::vector<double>& out)
{
    const Eigen::VectorXd va = a(pts);
    const Eigen::VectorXd vb = b(pts);
    if (va.size() != pts.cols() || vb.size() != pts.cols())
        throw ContractViolation("l1_distance: integrand returned the wrong number of values");
    for (Eigen::Index i = 0; i < pts.cols(); ++i) {
        const double diff = std::abs(va[i] - vb[i]);
        if (std::isnan(diff))
            throw QuadratureError("l1_distance: NaN integrand at " + format_point(pts.col(i)), pts.col(i));
        out.push_back(diff);
    }
}

}  // namespace

BatchFunction as_batch(const Network& net)
{
    return [net](const PointMatrix& pts) -> Eigen::VectorXd { return evaluate_batch(net, pts); };
}

BatchFunction as_batch(const LabelField& field)
{
    return [field](const PointMatrix& pts) {
        Eigen::VectorXd out(pts.cols());
        for (Eigen::Index i = 0; i < pts.cols(); ++i)
            out[i] = field.value_at(pts.col(i));
        return out;
    };
}

BatchFunction as_batch(std::function<double(const Point&)> fn)
{
    return [fn = std::move(fn)](const PointMatrix& pts) {
        Eigen::VectorXd out(pts.cols());
        for (Eigen::Index i = 0; i < pts.cols(); ++i)
            out[i] = fn(pts.col(i));
        return out;
    };
}

std::string to_string(QuadratureMethod m) { return m == QuadratureMethod::grid ? "grid" : "monte_carlo"; }

QuadratureMethod quadrature_method_from_string(const std::string& name)
{
    if (name == "monte_carlo")
        return QuadratureMethod::monte_carlo;
    if (name == "grid")
        return QuadratureMethod::grid;
    throw ContractViolation("unknown quadrature method \"" + name + "\"");
}

nlohmann::ordered_json QuadratureEstimate::to_json() const
{
    return {{"value", value},
            {"stderr", standard_error},
            {"samples", samples},
            {"method", to_string(method)},
            {"upper_confidence", upper_confidence}};
}

double pairwise_sum(std::span<const double> values)
{
    if (values.size() <= 16) {
        double s = 0.0;
        for (double v : values)
            s += v;
        return s;
    }
    const auto half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

constexpr std::uint64_t kMaxGridPoints = std::uint64_t{1} << 28;

QuadratureEstimate l1_distance(const BatchFunction& a, const BatchFunction& b, int dim,
                               const QuadratureSettings& settings)
{
    if (dim < 1)
        throw ContractViolation("l1_distance: dimension must be positive");
    QuadratureEstimate est;
    est.method = settings.method;
    std::vector<double> diffs;

    if (settings.method == QuadratureMethod::monte_carlo) {
        if (settings.samples < 100)
            throw ContractViolation("l1_distance: need at least 100 samples");
        diffs.reserve(settings.samples);
        CounterRng rng(settings.seed, 0);
        PointMatrix pts;
        for (std::uint64_t done = 0; done < settings.samples;) {
            const auto n = static_cast<Eigen::Index>(std::min<std::uint64_t>(kBatch, settings.samples - done));
            pts.resize(dim, n);
            for (Eigen::Index c = 0; c < n; ++c)
                for (int r = 0; r < dim; ++r)
                    pts(r, c) = rng.uniform();
            absolute_differences(a, b, pts, diffs);
            done += static_cast<std::uint64_t>(n);
        }
        const double n = static_cast<double>(diffs.size());
        est.value = pairwise_sum(diffs) / n;
        std::vector<double> sq(diffs.size());
        for (std::size_t i = 0; i < diffs.size(); ++i)
            sq[i] = (diffs[i] - est.value) * (diffs[i] - est.value);
        const double variance = pairwise_sum(sq) / (n - 1.0);
        est.standard_error = std::sqrt(variance / n);
        est.samples = settings.samples;
        est.upper_confidence = est.value + kConfidenceSigmas * est.standard_error;
        return est;
    }

    if (dim > 3)
        throw UnsupportedMethod("l1_distance: grid quadrature is limited to d <= 3");
    if (settings.samples < 100)
        throw ContractViolation("l1_distance: grid needs at least 100 points per axis");
    const std::uint64_t per_axis = settings.samples;
    std::uint64_t total = 1;
    for (int i = 0; i < dim; ++i) {
        if (total > kMaxGridPoints / per_axis)
            throw ContractViolation("l1_distance: grid of " + std::to_string(per_axis) + "^" + std::to_string(dim) +
                                    " points is too large");
        total *= per_axis;
    }
    diffs.reserve(total);
    const double h = 1.0 / static_cast<double>(per_axis);
    PointMatrix pts;
    for (std::uint64_t done = 0; done < total;) {
        const auto n = static_cast<Eigen::Index>(std::min<std::uint64_t>(kBatch, total - done));
        pts.resize(dim, n);
        for (Eigen::Index c = 0; c < n; ++c) {
            std::uint64_t idx = done + static_cast<std::uint64_t>(c);
            for (int r = 0; r < dim; ++r) {
                pts(r, c) = (static_cast<double>(idx % per_axis) + 0.5) * h;
                idx /= per_axis;
            }
        }
        absolute_differences(a, b, pts, diffs);
        done += static_cast<std::uint64_t>(n);
    }
    est.value = pairwise_sum(diffs) / static_cast<double>(total);
    est.standard_error = 0.0;
    est.samples = total;
    est.upper_confidence = est.value * (1.0 + settings.grid_bound_factor);
    return est;
}

}  // namespace choicenet
