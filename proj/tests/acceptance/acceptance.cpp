// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Every tolerance and runtime target is pinned below.

#include "choicenet/base_approximator.hpp"
#include "choicenet/experiment.hpp"
#include "choicenet/predictor.hpp"
#include "choicenet/quadrature.hpp"
#include "choicenet/sampler.hpp"
#include "choicenet/spike.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace choicenet;
using nlohmann::json;

namespace {

constexpr std::uint64_t kSeed = 20240611;
constexpr double kEpsilon = 0.1;
constexpr double kPoissonMean = 5.0;

// 1, 2
constexpr int kTrialsPerDim = 100;
constexpr double kExactRelTol = 1e-9;
constexpr std::uint64_t kBudgetSamples = 200000;
constexpr double kExactnessSeconds = 120.0;
constexpr double kBudgetSeconds = 180.0;
// 3
constexpr int kSpikeSpecsPerDim = 50;
constexpr std::uint64_t kSpikeSamples = 1000000;
constexpr double kSigmas = 4.0;
// 4
constexpr int kDisjointTrialsPerDim = 100;
constexpr int kProbesPerTrial = 10000;
// 5
constexpr std::uint64_t kIntersectionSets = 10000;
constexpr int kTargetSize = 10;
// 6
constexpr std::uint64_t kAdversarialTrials = 10000;
constexpr int kCorruptionSize = 10;
constexpr int kPositiveControls = 10;
// 7
constexpr int kAssemblyPoints = 10000;
constexpr int kMaxDepth = 5;
constexpr int kMaxSummands = 20;
constexpr double kAssemblyTol = 1e-10;
// 8
constexpr double kCertificateBudget = 0.01;
constexpr std::uint64_t kReestimateSamples = 1000000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& title, const std::string& detail)
{
    if (!pass)
        ++failures;
    std::printf("%s  [%2d] %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* format, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

const std::vector<std::string> kBases = {"constant", "affine", "sin2pi", "radial_bump"};

PredictorConfig predictor_config(OracleKind oracle)
{
    PredictorConfig cfg;
    cfg.epsilon = kEpsilon;
    cfg.oracle = std::move(oracle);
    cfg.approx.seed = derive_seed(kSeed, 2);
    return cfg;
}

FiniteSet grid_set(int dim, int size, std::uint64_t salt)
{
    CounterRng rng(derive_seed(kSeed, salt), 0);
    std::vector<Point> pts;
    for (int i = 0; i < size; ++i)
        pts.push_back(rng.uniform_point(dim));
    return FiniteSet::from_samples(dim, pts);
}

// Criteria 1 and 2 share their trials: the exactness pass builds the
// networks, the budget pass integrates them.
void exactness_and_budget()
{
    struct Trial {
        int dim;
        LabelField truth;
        Network network;
    };
    std::vector<Trial> trials;
    ApproximationCache cache;
    const PredictorConfig cfg = predictor_config(OracleKind::strip());

    const auto t0 = Clock::now();
    double worst = 0.0;
    std::size_t points = 0;
    int failed = 0;
    for (int d = 1; d <= 3; ++d) {
        for (int t = 0; t < kTrialsPerDim; ++t) {
            const LabelField truth(make_base_function(kBases[t % kBases.size()], json::object(), d));
            const FiniteSet x =
                sample_finite_set(SizeDistribution::poisson(kPoissonMean), d, derive_seed(kSeed, 10 + d), t);
            PredictionOutcome out = fit(x, mask(truth, x), cfg, &cache);
            audit(out, truth);
            bool ok = true;
            for (const auto& p : out.per_point) {
                worst = std::max(worst, p.abs_error / std::max(1.0, std::abs(p.hidden_truth)));
                ok = ok && p.abs_error <= kExactRelTol * std::max(1.0, std::abs(p.hidden_truth));
            }
            points += out.per_point.size();
            failed += ok ? 0 : 1;
            trials.push_back({d, truth, std::move(out.network)});
        }
    }
    const double t_exact = seconds_since(t0);
    report(1, failed == 0 && t_exact < kExactnessSeconds, "exactness on X",
           fmt("%zu trials, %zu points, %d failing trials, max |err|/max(1,|y|) = %.3g (tol %.0e); %.1f s (target < "
               "%.0f s)",
               trials.size(), points, failed, worst, kExactRelTol, t_exact, kExactnessSeconds));

    const auto t1 = Clock::now();
    double max_upper = 0.0;
    int over = 0;
    for (std::size_t i = 0; i < trials.size(); ++i) {
        QuadratureSettings q;
        q.samples = kBudgetSamples;
        q.seed = derive_seed(derive_seed(kSeed, 3), i);
        const auto est = l1_distance(as_batch(trials[i].network), as_batch(trials[i].truth), trials[i].dim, q);
        max_upper = std::max(max_upper, est.upper_confidence);
        over += est.upper_confidence < kEpsilon ? 0 : 1;
    }
    const double t_budget = seconds_since(t1);
    report(2, over == 0 && t_budget < kBudgetSeconds, "L1 budget",
           fmt("%zu trials at %llu MC samples, %d over budget, max upper confidence = %.4f (< %.2f); %.1f s (target < "
               "%.0f s)",
               trials.size(), static_cast<unsigned long long>(kBudgetSamples), over, max_upper, kEpsilon, t_budget,
               kBudgetSeconds));
}

void spike_norm()
{
    std::mt19937_64 rng(kSeed + 3);
    int disagreements = 0;
    double worst_z = 0.0;
    auto check = [&](const SpikeSpec& spec, std::uint64_t seed) {
        QuadratureSettings q;
        q.samples = kSpikeSamples;
        q.seed = seed;
        const int d = static_cast<int>(spec.center.size());
        const auto est =
            l1_distance(as_batch(build_spike(spec)), as_batch([](const Point&) { return 0.0; }), d, q);
        const double z = std::abs(est.value - spike_l1_bound(spec)) / est.standard_error;
        worst_z = std::max(worst_z, z);
        return std::make_pair(est, z <= kSigmas);
    };
    std::uniform_real_distribution<double> residual(-1.0, 1.0);
    std::uniform_int_distribution<int> log_n(1, 3);
    for (int d = 1; d <= 3; ++d) {
        for (int s = 0; s < kSpikeSpecsPerDim; ++s) {
            const std::uint64_t n = std::uint64_t{1} << log_n(rng);
            // Interior: the support box lies inside the cube.
            std::uniform_real_distribution<double> coord(1.0 / n, 1.0 - 1.0 / n);
            Point k(d);
            for (int l = 0; l < d; ++l)
                k[l] = oracle::to_grid(coord(rng));
            double r = 0.0;
            while (std::abs(r) < 0.05)
                r = residual(rng);
            disagreements += check({k, r, n}, derive_seed(kSeed, 1000 + d * 100 + s)).second ? 0 : 1;
        }
    }
    Point half(1);
    half[0] = 0.5;
    const auto [est, ok] = check({half, 1.0, 4}, derive_seed(kSeed, 999));
    report(3, disagreements == 0 && ok, "spike L1 norm closed form",
           fmt("%d specs at %llu samples, %d outside %.0f sigma (max z = %.2f); d=1 r=1 n=4: %.5f +- %.5f vs 0.25",
               3 * kSpikeSpecsPerDim, static_cast<unsigned long long>(kSpikeSamples), disagreements, kSigmas, worst_z,
               est.value, est.standard_error));
}

void support_disjointness()
{
    std::mt19937_64 rng(kSeed + 4);
    std::uniform_real_distribution<double> residual(-1.0, 1.0);
    std::uint64_t overlaps = 0;
    std::uint64_t covered = 0;
    std::uint64_t probes = 0;
    int trials = 0;
    for (int d = 1; d <= 3; ++d) {
        for (int t = 0; t < kDisjointTrialsPerDim; ++t) {
            const FiniteSet x =
                sample_finite_set(SizeDistribution::poisson(kPoissonMean), d, derive_seed(kSeed, 40 + d), t);
            if (x.size() < 2)
                continue;
            ++trials;
            std::vector<double> r;
            for (std::size_t i = 0; i < x.size(); ++i)
                r.push_back(residual(rng));
            const std::uint64_t n = select_resolution(x, r, kEpsilon);
            std::vector<Network> spikes;
            for (std::size_t i = 0; i < x.size(); ++i)
                spikes.push_back(build_spike({x.points()[i], r[i], n}));

            // Half the probes are uniform, half fall in a random spike's box.
            PointMatrix probe(d, kProbesPerTrial);
            std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
            std::uniform_real_distribution<double> offset(-1.0 / n, 1.0 / n);
            for (int c = 0; c < kProbesPerTrial; ++c) {
                const Point p = oracle::random_point(rng, d);
                if (c % 2 == 0) {
                    probe.col(c) = p;
                    continue;
                }
                const Point& k = x.points()[pick(rng)];
                for (int l = 0; l < d; ++l)
                    probe(l, c) = std::clamp(oracle::to_grid(k[l] + offset(rng)), 0.0, 1.0);
            }
            Eigen::VectorXi nonzero = Eigen::VectorXi::Zero(kProbesPerTrial);
            for (const auto& s : spikes)
                nonzero += (evaluate_batch(s, probe).array() != 0.0).cast<int>().matrix();
            overlaps += static_cast<std::uint64_t>((nonzero.array() > 1).count());
            covered += static_cast<std::uint64_t>((nonzero.array() == 1).count());
            probes += kProbesPerTrial;
        }
    }
    report(4, overlaps == 0, "spike support disjointness",
           fmt("%d trials, %llu probes, %llu inside exactly one support, %llu inside two or more (tolerance 0)",
               trials, static_cast<unsigned long long>(probes), static_cast<unsigned long long>(covered),
               static_cast<unsigned long long>(overlaps)));
}

void measure_zero_intersection()
{
    // The target is drawn from the sampler's own grid, so a hit is possible.
    const FiniteSet target = grid_set(1, kTargetSize, 50);
    const IntersectionLog log = intersection_trials(SizeDistribution::poisson(kPoissonMean), 1, target,
                                                    kIntersectionSets, derive_seed(kSeed, 51));
    report(5, log.trials == kIntersectionSets && log.hits == 0, "finite sets miss a fixed finite target",
           fmt("%llu sets vs %zu-point target: %llu hits", static_cast<unsigned long long>(log.trials), target.size(),
               static_cast<unsigned long long>(log.hits)));
}

void adversarial_almost_sure()
{
    const int d = 1;
    const LabelField truth(make_base_function("sin2pi", json::object(), d));
    const FiniteSet corruption_points = grid_set(d, kCorruptionSize, 60);
    ExceptionMap corruption;
    for (const auto& p : corruption_points.points())
        corruption[p] = truth.value_at(p) < 0.5 ? 1.0 : 0.0;
    ApproximationCache cache;
    const PredictorConfig cfg = predictor_config(OracleKind::adversarial(corruption));

    std::set<std::uint64_t> failure_log;
    std::set<std::uint64_t> hit_log;
    auto run = [&](std::uint64_t trial, const FiniteSet& x) {
        PredictionOutcome out = fit(x, mask(truth, x), cfg, &cache);
        audit(out, truth);
        bool hit = false;
        bool fail = false;
        for (const auto& p : out.per_point) {
            hit = hit || corruption.count(p.point) > 0;
            fail = fail || !exact_on_point(p.predicted, p.hidden_truth);
        }
        if (hit)
            hit_log.insert(trial);
        if (fail)
            failure_log.insert(trial);
    };
    const std::uint64_t sampler = derive_seed(kSeed, 61);
    for (std::uint64_t t = 0; t < kAdversarialTrials; ++t)
        run(t, sample_finite_set(SizeDistribution::poisson(kPoissonMean), d, sampler, t));
    const std::size_t natural_hits = hit_log.size();
    const std::size_t natural_failures = failure_log.size();
    const bool natural_equal = hit_log == failure_log;

    // Positive controls: planted corruption points must show up in both logs.
    for (int c = 0; c < kPositiveControls; ++c) {
        FiniteSet drawn = sample_finite_set(SizeDistribution::poisson(kPoissonMean), d, sampler, kAdversarialTrials + c);
        std::vector<Point> pts = drawn.points();
        pts.push_back(corruption_points.points()[static_cast<std::size_t>(c) % corruption_points.size()]);
        run(kAdversarialTrials + c, FiniteSet::from_samples(d, pts));
    }
    const bool controls_logged = hit_log.size() == natural_hits + kPositiveControls;
    report(6, natural_equal && hit_log == failure_log && controls_logged, "failures exactly where X meets corruption",
           fmt("%llu trials: %zu failure trials, %zu hit trials, logs %s; %d planted controls %s",
               static_cast<unsigned long long>(kAdversarialTrials), natural_failures, natural_hits,
               natural_equal ? "identical" : "differ", kPositiveControls,
               hit_log == failure_log && controls_logged ? "in both logs" : "NOT in both logs"));
}

void assembly_fidelity()
{
    std::mt19937_64 rng(kSeed + 7);
    double worst = 0.0;
    int configs = 0;
    for (int summands = 1; summands <= kMaxSummands; ++summands) {
        const int d = 1 + summands % 3;
        std::uniform_int_distribution<int> depth(1, kMaxDepth);
        std::vector<Network> nets;
        for (int s = 0; s < summands; ++s)
            nets.push_back(oracle::random_network(rng, oracle::random_widths(rng, d, depth(rng), 8)));
        const Network total = sum_networks(nets);
        PointMatrix pts(d, kAssemblyPoints);
        for (int c = 0; c < kAssemblyPoints; ++c)
            pts.col(c) = oracle::random_point(rng, d);
        Eigen::VectorXd expected = Eigen::VectorXd::Zero(kAssemblyPoints);
        for (const auto& n : nets)
            expected += evaluate_batch(n, pts);
        worst = std::max(worst, (evaluate_batch(total, pts) - expected).cwiseAbs().maxCoeff());
        ++configs;
    }
    report(7, worst <= kAssemblyTol, "sum_networks matches summed outputs",
           fmt("%d sums of 1..%d networks (depth 1..%d), %d points each: max |diff| = %.3g (tol %.0e)", configs,
               kMaxSummands, kMaxDepth, kAssemblyPoints, worst, kAssemblyTol));
}

void base_certificate()
{
    const auto base = make_base_function("sin2pi", json::object(), 1);
    ApproxSettings settings;
    settings.seed = derive_seed(kSeed, 80);
    const BaseApproximation approx = approximate(LabelField(base), kCertificateBudget, settings);
    const auto& cert = approx.certificate.estimate;

    QuadratureSettings q;
    q.samples = kReestimateSamples;
    q.seed = derive_seed(kSeed, 81);
    const auto again = l1_distance(as_batch(approx.network), as_batch(LabelField(base)), 1, q);
    const double z = std::abs(again.value - cert.value) /
                     std::sqrt(cert.standard_error * cert.standard_error + again.standard_error * again.standard_error);
    const bool certified = cert.upper_confidence < kCertificateBudget;

    // Non-integrable: the zero network, whatever the base.
    bool zero_ok = true;
    std::mt19937_64 rng(kSeed + 8);
    for (const auto& [name, d] : std::vector<std::pair<std::string, int>>{{"sin2pi", 1}, {"scrambled", 2}}) {
        const LabelField field(make_base_function(name, json::object(), d), false);
        const BaseApproximation zero = approximate(field, kCertificateBudget, settings);
        zero_ok = zero_ok && zero.certificate.strategy == ApproxStrategy::zero;
        PointMatrix pts(d, 1000);
        for (int c = 0; c < pts.cols(); ++c)
            pts.col(c) = oracle::random_point(rng, d);
        zero_ok = zero_ok && (evaluate_batch(zero.network, pts).array() == 0.0).all();
    }
    report(8, certified && z <= kSigmas && zero_ok, "base approximation certificate",
           fmt("sin^2 budget %.2f: m = %llu, certified %.5f (upper %.5f); re-estimate %.5f, z = %.2f (<= %.0f); "
               "non-integrable -> zero network: %s",
               kCertificateBudget, static_cast<unsigned long long>(approx.certificate.grid_resolution), cert.value,
               cert.upper_confidence, again.value, z, kSigmas, zero_ok ? "yes" : "no"));
}

void spike_depth()
{
    std::mt19937_64 rng(kSeed + 9);
    std::uniform_real_distribution<double> residual(-1.0, 1.0);
    int built = 0;
    int wrong = 0;
    for (int d = 1; d <= 16; ++d) {
        for (int log_n = 0; log_n <= 40; log_n += 4) {
            const SpikeSpec spec{oracle::random_point(rng, d), residual(rng), std::uint64_t{1} << log_n};
            const auto w = build_spike(spec).widths();
            const std::vector<Eigen::Index> expected{d, 3 * d, 1, 1};
            wrong += w == expected ? 0 : 1;
            ++built;
        }
    }
    report(9, wrong == 0, "spike widths (d, 3d, 1, 1)", fmt("%d spikes for d = 1..16: %d with other widths", built, wrong));
}

void determinism()
{
    std::vector<std::filesystem::path> configs;
    for (const auto& entry : std::filesystem::directory_iterator(CHOICENET_CONFIG_DIR))
        if (entry.path().extension() == ".json")
            configs.push_back(entry.path());
    std::sort(configs.begin(), configs.end());
    int differing = 0;
    for (const auto& path : configs) {
        const ExperimentConfig cfg = load_config(path);
        const ExperimentReport a = run_experiment(cfg);
        const ExperimentReport b = run_experiment(cfg);
        const bool same = a.deterministic_text() == b.deterministic_text() && a.per_point_csv == b.per_point_csv &&
                          a.figures == b.figures;
        differing += same ? 0 : 1;
    }
    report(10, !configs.empty() && differing == 0, "deterministic reports",
           fmt("%zu shipped configs run twice: %d differ outside run_info", configs.size(), differing));
}

}  // namespace

int main()
{
    const auto t0 = Clock::now();
    exactness_and_budget();
    spike_norm();
    support_disjointness();
    measure_zero_intersection();
    adversarial_almost_sure();
    assembly_fidelity();
    base_certificate();
    spike_depth();
    determinism();
    std::printf("%s: %d of 10 criteria failed (%.1f s)\n", failures == 0 ? "ALL PASS" : "FAILED", failures,
                seconds_since(t0));
    return failures == 0 ? 0 : 1;
}
