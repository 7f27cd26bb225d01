#include "choicenet/experiment.hpp"

#include "choicenet/serialization.hpp"
#include "choicenet/svg.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

namespace choicenet {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kSamplerSalt = 1;
constexpr std::uint64_t kCertificateSalt = 2;
constexpr std::uint64_t kBudgetSalt = 3;

std::string line_col(const std::string& text, std::size_t byte)
{
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

std::uint64_t read_count(const json& doc, const char* key, std::uint64_t fallback, const std::string& pointer)
{
    if (!doc.contains(key))
        return fallback;
    const json& v = doc[key];
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(pointer + "/" + key + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
}

double read_real(const json& doc, const char* key, double fallback, const std::string& pointer)
{
    if (!doc.contains(key))
        return fallback;
    if (!doc[key].is_number())
        throw ConfigError(pointer + "/" + key + ": expected a number");
    return doc[key].get<double>();
}

void reject_unknown(const json& doc, const std::set<std::string>& known, const std::string& pointer)
{
    for (const auto& item : doc.items())
        if (!known.contains(item.key()))
            throw ConfigError(pointer + "/" + item.key() + ": unknown key");
}

std::string number_text(double v) { return json(v).dump(); }

struct TrialResult {
    ordered_json record;
    std::string csv;
    bool completed = false;
    bool assertions_pass = false;
    bool exact = false;
    bool hit = false;
    bool expected_failure = false;
    double max_error = 0.0;
    std::optional<double> l1_upper;
    std::optional<PredictionOutcome> outcome;  // kept for figures
};

TrialResult run_trial(const ExperimentConfig& cfg, std::uint64_t t, ApproximationCache& cache)
{
    TrialResult result;
    auto& rec = result.record;
    rec["index"] = t;
    const bool adversarial = cfg.oracle.tag == OracleKind::Tag::adversarial;
    try {
        const FiniteSet x = sample_finite_set(cfg.nu, cfg.dim, sampler_seed(cfg.seed), t);
        const LabelField masked = mask(cfg.field, x);
        PredictionOutcome outcome = fit(x, masked, cfg.predictor(), &cache);
        audit(outcome, cfg.field);

        rec["status"] = "ok";
        rec["set_size"] = x.size();
        rec["n_star"] = outcome.n_star ? json(*outcome.n_star) : json(nullptr);
        rec["spike_count"] = outcome.spike_count;
        rec["network_widths"] = outcome.network.widths();
        rec["certificate"] = outcome.certificate.to_json();

        auto residuals = ordered_json::array();
        for (const auto& [k, r] : outcome.residuals)
            residuals.push_back({{"point", point_to_json(k)}, {"residual", r}});
        rec["residuals"] = std::move(residuals);

        bool all_exact = true;
        bool failures_match = true;
        auto per_point = ordered_json::array();
        auto failing = ordered_json::array();
        auto hits = ordered_json::array();
        std::ostringstream csv;
        for (std::size_t i = 0; i < outcome.per_point.size(); ++i) {
            const auto& p = outcome.per_point[i];
            const bool exact = exact_on_point(p.predicted, p.hidden_truth);
            const auto corrupted = cfg.oracle.corruption.find(p.point);
            const bool hit = adversarial && corrupted != cfg.oracle.corruption.end();
            const bool expected_failure = hit && !exact_on_point(corrupted->second, p.hidden_truth);
            all_exact = all_exact && exact;
            failures_match = failures_match && (exact != expected_failure);
            result.max_error = std::max(result.max_error, p.abs_error);
            result.hit = result.hit || hit;
            result.expected_failure = result.expected_failure || expected_failure;
            if (!exact)
                failing.push_back(i);
            if (hit)
                hits.push_back(i);
            ordered_json entry{{"point", point_to_json(p.point)},
                               {"predicted", p.predicted},
                               {"hidden_truth", p.hidden_truth},
                               {"abs_error", p.abs_error},
                               {"exact", exact}};
            if (adversarial)
                entry["corruption_hit"] = hit;
            per_point.push_back(std::move(entry));

            csv << t << ',' << i;
            for (Eigen::Index c = 0; c < p.point.size(); ++c)
                csv << ',' << number_text(p.point[c]);
            csv << ',' << number_text(p.predicted) << ',' << number_text(p.hidden_truth) << ','
                << number_text(p.abs_error) << ',' << (exact ? "true" : "false") << ',' << (hit ? "true" : "false")
                << '\n';
        }
        result.exact = all_exact;
        rec["exactness"] = {{"pass", all_exact},
                            {"tolerance", kExactnessTolerance},
                            {"max_abs_error", result.max_error},
                            {"failing_points", std::move(failing)}};
        if (adversarial)
            rec["corruption"] = {{"hit_points", std::move(hits)}, {"failures_match_hits", failures_match}};

        bool l1_pass = true;
        if (cfg.field.integrable()) {
            QuadratureSettings quad;
            quad.method = cfg.method;
            quad.samples = cfg.samples;
            quad.seed = budget_check_seed(cfg.seed, t);
            quad.grid_bound_factor = cfg.grid_bound_factor;
            const auto est = l1_distance(as_batch(outcome.network), as_batch(cfg.field), cfg.dim, quad);
            l1_pass = est.upper_confidence < cfg.epsilon;
            result.l1_upper = est.upper_confidence;
            rec["l1_budget"] = {
                {"applicable", true}, {"seed", quad.seed}, {"estimate", est.to_json()}, {"pass", l1_pass}};
        } else {
            rec["l1_budget"] = {{"applicable", false}};
        }
        rec["per_point"] = std::move(per_point);
        if (cfg.emit_networks)
            rec["network"] = network_to_json(outcome.network);

        result.csv = csv.str();
        result.completed = true;
        result.assertions_pass = (adversarial ? failures_match : all_exact) && l1_pass;
        if (t < cfg.figure_trials)
            result.outcome = std::move(outcome);
    } catch (const std::exception& e) {
        rec["status"] = "failed";
        rec["error"] = e.what();
    }
    return result;
}

std::string iso_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

}  // namespace

PredictorConfig ExperimentConfig::predictor() const
{
    PredictorConfig p;
    p.epsilon = epsilon;
    p.oracle = oracle;
    p.approx.samples = certificate_samples;
    p.approx.seed = certificate_seed(seed);
    p.approx.max_refinements = max_refinements;
    p.approx.max_nodes = max_nodes;
    return p;
}

ordered_json ExperimentConfig::to_json() const
{
    ordered_json doc;
    doc["d"] = dim;
    doc["epsilon"] = epsilon;
    doc["trials"] = trials;
    doc["seed"] = seed;
    doc["field"] = field_to_json(field);
    oracle_to_json(oracle, doc);
    doc["nu"] = nu.to_json();
    doc["quadrature"] = {{"method", to_string(method)},
                         {"samples", samples},
                         {"certificate_samples", certificate_samples},
                         {"grid_bound_factor", grid_bound_factor}};
    doc["max_refinements"] = max_refinements;
    doc["max_nodes"] = max_nodes;
    doc["emit_networks"] = emit_networks;
    doc["figure_trials"] = figure_trials;
    doc["output_dir"] = output_dir;
    return doc;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ": " + line_col(text, e.byte) + ": " + e.what());
    }
    try {
        if (!doc.is_object())
            throw ConfigError("/: expected a JSON object");
        reject_unknown(doc,
                       {"d", "epsilon", "trials", "seed", "field", "oracle", "corruption", "nu", "quadrature",
                        "max_refinements", "max_nodes", "emit_networks", "figure_trials", "output_dir"},
                       "");
        ExperimentConfig cfg;
        const std::uint64_t d = read_count(doc, "d", 1, "");
        if (d < 1 || d > 16)
            throw ConfigError("/d: dimension must lie in [1, 16]");
        cfg.dim = static_cast<int>(d);
        cfg.epsilon = read_real(doc, "epsilon", 0.1, "");
        if (!(cfg.epsilon > 0.0))
            throw ConfigError("/epsilon: must be positive");
        cfg.trials = read_count(doc, "trials", 1, "");
        if (cfg.trials < 1)
            throw ConfigError("/trials: must be >= 1");
        cfg.seed = read_count(doc, "seed", 0, "");
        if (!doc.contains("field"))
            throw ConfigError("/field: missing field description");
        cfg.field = field_from_json(doc["field"], cfg.dim, "/field");
        cfg.oracle = oracle_from_json(doc, cfg.dim);
        if (doc.contains("nu"))
            cfg.nu = SizeDistribution::from_json(doc["nu"], "/nu");
        if (doc.contains("quadrature")) {
            const json& q = doc["quadrature"];
            if (!q.is_object())
                throw ConfigError("/quadrature: expected an object");
            reject_unknown(q, {"method", "samples", "certificate_samples", "grid_bound_factor"}, "/quadrature");
            if (q.contains("method")) {
                if (!q["method"].is_string())
                    throw ConfigError("/quadrature/method: expected \"monte_carlo\" or \"grid\"");
                cfg.method = quadrature_method_from_string(q["method"].get<std::string>());
            }
            cfg.samples = read_count(q, "samples", cfg.samples, "/quadrature");
            cfg.certificate_samples = read_count(q, "certificate_samples", cfg.certificate_samples, "/quadrature");
            cfg.grid_bound_factor = read_real(q, "grid_bound_factor", cfg.grid_bound_factor, "/quadrature");
        }
        cfg.max_refinements = static_cast<int>(read_count(doc, "max_refinements", 12, ""));
        cfg.max_nodes = read_count(doc, "max_nodes", cfg.max_nodes, "");
        if (doc.contains("emit_networks")) {
            if (!doc["emit_networks"].is_boolean())
                throw ConfigError("/emit_networks: expected true or false");
            cfg.emit_networks = doc["emit_networks"].get<bool>();
        }
        cfg.figure_trials = read_count(doc, "figure_trials", cfg.figure_trials, "");
        if (doc.contains("output_dir")) {
            if (!doc["output_dir"].is_string())
                throw ConfigError("/output_dir: expected a string");
            cfg.output_dir = doc["output_dir"].get<std::string>();
        }
        return cfg;
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    } catch (const ContractViolation& e) {
        throw ConfigError(source + ": " + e.what());
    }
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path.string() + ": cannot open config file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.string());
}

std::uint64_t sampler_seed(std::uint64_t seed) { return derive_seed(seed, kSamplerSalt); }
std::uint64_t certificate_seed(std::uint64_t seed) { return derive_seed(seed, kCertificateSalt); }
std::uint64_t budget_check_seed(std::uint64_t seed, std::uint64_t trial)
{
    return derive_seed(derive_seed(seed, kBudgetSalt), trial);
}

std::string ExperimentReport::deterministic_text() const
{
    ordered_json copy = document;
    copy.erase("run_info");
    return copy.dump(2);
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options)
{
    const auto start = std::chrono::steady_clock::now();
    unsigned workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, cfg.trials));

    ApproximationCache cache;
    std::vector<TrialResult> results(cfg.trials);
    std::atomic<std::uint64_t> next{0};
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::uint64_t t = next++; t < cfg.trials; t = next++)
                    results[t] = run_trial(cfg, t, cache);
            });
    }

    ExperimentReport report;
    auto& doc = report.document;
    doc["tool"] = {{"name", "choicenet"}, {"version", CHOICENET_VERSION}};
    doc["config"] = cfg.to_json();
    doc["seeds"] = {{"sampler", sampler_seed(cfg.seed)}, {"certificate", certificate_seed(cfg.seed)}};

    std::ostringstream csv;
    csv << "trial,point_index";
    for (int c = 0; c < cfg.dim; ++c)
        csv << ",x" << c;
    csv << ",predicted,hidden_truth,abs_error,exact,corruption_hit\n";

    const bool adversarial = cfg.oracle.tag == OracleKind::Tag::adversarial;
    auto trials = ordered_json::array();
    auto failed = ordered_json::array();
    auto exactness_failures = ordered_json::array();
    auto hit_trials = ordered_json::array();
    auto expected_failures = ordered_json::array();
    double max_error = 0.0;
    double max_upper = 0.0;
    bool l1_all = true;
    bool all_pass = true;
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
        auto& r = results[t];
        all_pass = all_pass && r.completed && r.assertions_pass;
        if (!r.completed) {
            failed.push_back(t);
        } else {
            if (!r.exact)
                exactness_failures.push_back(t);
            if (r.hit)
                hit_trials.push_back(t);
            if (r.expected_failure)
                expected_failures.push_back(t);
            max_error = std::max(max_error, r.max_error);
            if (r.l1_upper) {
                max_upper = std::max(max_upper, *r.l1_upper);
                l1_all = l1_all && *r.l1_upper < cfg.epsilon;
            }
        }
        csv << r.csv;
        if (r.outcome && cfg.dim <= 2) {
            std::ostringstream name;
            name << "trial_" << std::setw(4) << std::setfill('0') << t << (cfg.dim == 1 ? "_overlay" : "_heatmap")
                 << ".svg";
            report.figures[name.str()] =
                cfg.dim == 1 ? overlay_svg(cfg.field, *r.outcome) : heatmap_svg(cfg.field, *r.outcome);
        }
        trials.push_back(std::move(r.record));
    }
    doc["trials"] = std::move(trials);

    ordered_json aggregate;
    aggregate["trials"] = cfg.trials;
    aggregate["failed_trials"] = failed;
    aggregate["max_test_point_error"] = max_error;
    aggregate["exactness_failure_trials"] = exactness_failures;
    if (adversarial) {
        aggregate["corruption_hit_trials"] = hit_trials;
        aggregate["failures_match_hits"] = exactness_failures == expected_failures;
        all_pass = all_pass && exactness_failures == expected_failures;
    }
    aggregate["l1_budget_max_upper_confidence"] = max_upper;
    aggregate["l1_budget_all_pass"] = l1_all;
    aggregate["all_assertions_pass"] = all_pass;
    doc["aggregate"] = std::move(aggregate);

    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    doc["run_info"] = {{"timestamp", iso_timestamp()}, {"wall_clock_seconds", seconds}, {"workers", workers}};

    report.per_point_csv = csv.str();
    report.all_pass = all_pass;
    return report;
}

void write_report(const ExperimentReport& report, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write " + (dir / name).string());
        out << content;
    };
    write("report.json", report.document.dump(2) + "\n");
    write("per_point.csv", report.per_point_csv);
    for (const auto& [name, svg] : report.figures)
        write(name, svg);
}

std::filesystem::path default_output_root()
{
    if (const char* env = std::getenv("CHOICENET_OUTPUT_DIR"); env && *env)
        return env;
    return "choicenet_out";
}

bool VerifyResult::all_pass() const
{
    return std::all_of(assertions.begin(), assertions.end(), [](const auto& a) { return a.pass; });
}

VerifyResult verify(const json& report)
{
    if (!report.is_object() || !report.contains("config") || !report.contains("trials"))
        throw VerificationError("report lacks \"config\" or \"trials\"");
    const ExperimentConfig cfg = parse_config(report["config"].dump(), "report config");
    const bool adversarial = cfg.oracle.tag == OracleKind::Tag::adversarial;
    VerifyResult result;
    auto add = [&](std::string name, std::int64_t trial, bool pass, std::string detail = {}) {
        result.assertions.push_back({std::move(name), trial, pass, std::move(detail)});
    };

    const json& trials = report["trials"];
    add("trial_count", -1, trials.is_array() && trials.size() == cfg.trials,
        "expected " + std::to_string(cfg.trials) + " trials");
    if (!trials.is_array())
        return result;

    std::set<std::int64_t> failures;
    std::set<std::int64_t> expected;
    for (const json& rec : trials) {
        const auto t = rec.value("index", std::int64_t{-1});
        if (rec.value("status", std::string{}) != "ok") {
            add("trial_completed", t, false, rec.value("error", std::string{"unknown error"}));
            continue;
        }
        if (!rec.contains("network"))
            throw VerificationError("trial " + std::to_string(t) + ": missing network serialization");
        const Network net = network_from_json(rec["network"], "/trials/" + std::to_string(t) + "/network");

        const FiniteSet x = sample_finite_set(cfg.nu, cfg.dim, sampler_seed(cfg.seed), static_cast<std::uint64_t>(t));
        const json& per_point = rec["per_point"];
        bool sample_ok = per_point.size() == x.size();
        bool reproduced = true;
        bool truth_ok = true;
        bool exact = true;
        bool match = true;
        std::string detail;
        for (std::size_t i = 0; i < per_point.size(); ++i) {
            const Point p = point_from_json(per_point[i]["point"], cfg.dim, "per_point");
            sample_ok = sample_ok && i < x.size() && same_point(p, x.points()[i]);
            const double recorded = per_point[i]["predicted"].get<double>();
            const double truth = cfg.field.value_at(p);
            const double value = evaluate(net, p);
            if (std::abs(value - recorded) > 1e-12 * std::max(1.0, std::abs(recorded))) {
                reproduced = false;
                detail = "point " + std::to_string(i) + ": network gives " + number_text(value) + ", report says " +
                         number_text(recorded);
            }
            truth_ok = truth_ok && per_point[i]["hidden_truth"].get<double>() == truth;
            const bool point_exact = exact_on_point(value, truth);
            exact = exact && point_exact;
            const auto corrupted = cfg.oracle.corruption.find(p);
            const bool expected_failure = adversarial && corrupted != cfg.oracle.corruption.end() &&
                                          !exact_on_point(corrupted->second, truth);
            match = match && (point_exact != expected_failure);
            if (expected_failure)
                expected.insert(t);
        }
        if (!exact)
            failures.insert(t);
        add("sample_reproduced", t, sample_ok);
        add("network_reproduces_predictions", t, reproduced, detail);
        add("hidden_truth_consistent", t, truth_ok);
        if (adversarial)
            add("exactness_failures_match_corruption_hits", t, match);
        else
            add("exact_on_x", t, exact, exact ? "" : "a hidden label is not reproduced within tolerance");

        if (cfg.field.integrable()) {
            const json& l1 = rec["l1_budget"];
            QuadratureSettings quad;
            quad.method = cfg.method;
            quad.samples = cfg.samples;
            quad.seed = l1["seed"].get<std::uint64_t>();
            quad.grid_bound_factor = cfg.grid_bound_factor;
            const auto est = l1_distance(as_batch(net), as_batch(cfg.field), cfg.dim, quad);
            const double recorded = l1["estimate"]["value"].get<double>();
            const bool same = std::abs(est.value - recorded) <= 1e-12 * std::max(1.0, recorded);
            add("l1_budget", t, same && est.upper_confidence < cfg.epsilon,
                "upper confidence " + number_text(est.upper_confidence) + (same ? "" : " (differs from report)"));
        }
    }
    if (adversarial)
        add("failure_trials_equal_hit_trials", -1, failures == expected);
    return result;
}

VerifyResult verify_file(const std::filesystem::path& report_path)
{
    std::ifstream in(report_path);
    if (!in)
        throw VerificationError(report_path.string() + ": cannot open report");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw VerificationError(report_path.string() + ": " + e.what());
    }
    return verify(doc);
}

}  // namespace choicenet
