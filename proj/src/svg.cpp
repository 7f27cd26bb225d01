#include "choicenet/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace choicenet {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 40.0;

struct Frame {
    double lo;
    double hi;

    double sx(double x) const { return kMargin + x * (kWidth - 2 * kMargin); }
    double sy(double y) const { return kHeight - kMargin - (y - lo) / (hi - lo) * (kHeight - 2 * kMargin); }
};

std::string polyline(const std::vector<std::pair<double, double>>& pts, const Frame& f, const char* color)
{
    std::ostringstream out;
    out.precision(6);
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts)
        out << f.sx(x) << ',' << f.sy(y) << ' ';
    out << "\"/>\n";
    return out.str();
}

std::string heat_color(double t)
{
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(255 * t);
    const int g = static_cast<int>(255 * (1 - std::abs(2 * t - 1)));
    const int b = static_cast<int>(255 * (1 - t));
    std::ostringstream out;
    out << "rgb(" << r << ',' << g << ',' << b << ')';
    return out.str();
}

}  // namespace

std::string overlay_svg(const LabelField& truth, const PredictionOutcome& outcome)
{
    if (truth.dim() != 1)
        throw ContractViolation("overlay_svg: requires d = 1");
    std::vector<double> xs;
    constexpr int kSamples = 1024;
    for (int i = 0; i <= kSamples; ++i)
        xs.push_back(static_cast<double>(i) / kSamples);
    const double half_width = outcome.n_star ? 1.0 / static_cast<double>(*outcome.n_star) : 0.0;
    for (const auto& [k, r] : outcome.residuals)
        for (double dx : {-half_width, -0.5 * half_width, 0.0, 0.5 * half_width, half_width})
            if (k[0] + dx >= 0.0 && k[0] + dx <= 1.0)
                xs.push_back(k[0] + dx);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    PointMatrix grid(1, static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i)
        grid(0, static_cast<Eigen::Index>(i)) = xs[i];
    const Eigen::VectorXd net = evaluate_batch(outcome.network, grid);

    std::vector<std::pair<double, double>> base_line;
    std::vector<std::pair<double, double>> net_line;
    double lo = 0.0;
    double hi = 1.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double b = truth.base()(grid.col(static_cast<Eigen::Index>(i)));
        base_line.emplace_back(xs[i], b);
        net_line.emplace_back(xs[i], net[static_cast<Eigen::Index>(i)]);
        lo = std::min({lo, b, net[static_cast<Eigen::Index>(i)]});
        hi = std::max({hi, b, net[static_cast<Eigen::Index>(i)]});
    }
    const Frame f{lo - 0.05, hi + 0.05};

    std::ostringstream out;
    out.precision(6);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<line x1=\"" << f.sx(0) << "\" y1=\"" << f.sy(0) << "\" x2=\"" << f.sx(1) << "\" y2=\"" << f.sy(0)
        << "\" stroke=\"#999\"/>\n";
    for (const auto& [k, r] : outcome.residuals) {
        const double x0 = std::max(0.0, k[0] - half_width);
        const double x1 = std::min(1.0, k[0] + half_width);
        out << "<rect x=\"" << f.sx(x0) << "\" y=\"" << kMargin << "\" width=\"" << f.sx(x1) - f.sx(x0)
            << "\" height=\"" << kHeight - 2 * kMargin << "\" fill=\"#fdd\" opacity=\"0.6\"/>\n";
    }
    out << polyline(base_line, f, "#1f77b4") << polyline(net_line, f, "#d62728");
    for (const auto& p : outcome.per_point) {
        const double y = std::isnan(p.hidden_truth) ? p.predicted : p.hidden_truth;
        out << "<circle cx=\"" << f.sx(p.point[0]) << "\" cy=\"" << f.sy(y)
            << "\" r=\"4\" fill=\"none\" stroke=\"black\"/>\n";
    }
    out << "<text x=\"" << kMargin << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"12\">"
        << "blue: base function, red: network, circles: hidden labels on X, shaded: spike supports</text>\n"
        << "</svg>\n";
    return out.str();
}

std::string heatmap_svg(const LabelField& truth, const PredictionOutcome& outcome, int cells)
{
    if (truth.dim() != 2)
        throw ContractViolation("heatmap_svg: requires d = 2");
    if (cells < 1)
        throw ContractViolation("heatmap_svg: cells must be positive");
    PointMatrix grid(2, cells * cells);
    for (int i = 0; i < cells; ++i)
        for (int j = 0; j < cells; ++j) {
            grid(0, i * cells + j) = (i + 0.5) / cells;
            grid(1, i * cells + j) = (j + 0.5) / cells;
        }
    const Eigen::VectorXd net = evaluate_batch(outcome.network, grid);
    Eigen::VectorXd err(grid.cols());
    for (Eigen::Index c = 0; c < grid.cols(); ++c)
        err[c] = std::abs(net[c] - truth.base()(grid.col(c)));
    const double top = std::max(err.maxCoeff(), 1e-12);

    const double side = kHeight - 2 * kMargin;
    const double cell = side / cells;
    std::ostringstream out;
    out.precision(6);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << side + 2 * kMargin << "\" height=\"" << kHeight
        << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (int i = 0; i < cells; ++i)
        for (int j = 0; j < cells; ++j)
            out << "<rect x=\"" << kMargin + i * cell << "\" y=\"" << kMargin + (cells - 1 - j) * cell
                << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
                << heat_color(err[i * cells + j] / top) << "\"/>\n";
    for (const auto& p : outcome.per_point)
        out << "<circle cx=\"" << kMargin + p.point[0] * side << "\" cy=\"" << kMargin + (1 - p.point[1]) * side
            << "\" r=\"3\" fill=\"white\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kMargin << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"12\">"
        << "|network - base|, max " << top << "; circles: X</text>\n</svg>\n";
    return out.str();
}

}  // namespace choicenet
