#include "choicenet/base_approximator.hpp"
#include "choicenet/experiment.hpp"
#include "choicenet/serialization.hpp"
#include "choicenet/spike.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

using namespace choicenet;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

int cmd_run(const std::string& config_path, unsigned workers, const std::string& out_dir)
{
    const ExperimentConfig cfg = load_config(config_path);
    const ExperimentReport report = run_experiment(cfg, RunOptions{workers});
    std::filesystem::path dir;
    if (!out_dir.empty())
        dir = out_dir;
    else if (!cfg.output_dir.empty())
        dir = cfg.output_dir;
    else
        dir = default_output_root() / std::filesystem::path(config_path).stem();
    write_report(report, dir);
    ordered_json summary;
    summary["output_dir"] = dir.string();
    summary["aggregate"] = report.document["aggregate"];
    summary["wall_clock_seconds"] = report.document["run_info"]["wall_clock_seconds"];
    std::cout << summary.dump(2) << '\n';
    return report.all_pass ? 0 : 1;
}

int cmd_verify(const std::string& report_path)
{
    const VerifyResult result = verify_file(report_path);
    ordered_json out;
    auto items = ordered_json::array();
    for (const auto& a : result.assertions) {
        ordered_json item{{"name", a.name}, {"trial", a.trial}, {"pass", a.pass}};
        if (!a.detail.empty())
            item["detail"] = a.detail;
        items.push_back(std::move(item));
    }
    out["assertions"] = std::move(items);
    out["all_pass"] = result.all_pass();
    std::cout << out.dump(2) << '\n';
    return result.all_pass() ? 0 : 1;
}

int cmd_build_spike(const std::vector<double>& center, double residual, std::uint64_t n)
{
    SpikeSpec spec{Eigen::Map<const Eigen::VectorXd>(center.data(), static_cast<Eigen::Index>(center.size())),
                   residual, n};
    const Network net = build_spike(spec);
    ordered_json out;
    out["center"] = point_to_json(spec.center);
    out["residual"] = residual;
    out["resolution"] = n;
    out["value_at_center"] = evaluate(net, spec.center);
    out["l1_bound"] = spike_l1_bound(spec);
    out["network"] = network_to_json(net);
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_sample(const std::string& nu, int d, std::uint64_t seed, std::uint64_t stream)
{
    const SizeDistribution dist = SizeDistribution::parse(nu);
    const FiniteSet x = sample_finite_set(dist, d, seed, stream);
    ordered_json out;
    out["nu"] = dist.to_json();
    out["d"] = d;
    out["seed"] = seed;
    out["stream"] = stream;
    auto points = ordered_json::array();
    for (const auto& p : x.points())
        points.push_back(point_to_json(p));
    out["size"] = x.size();
    out["points"] = std::move(points);
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_approx(const std::string& base, const std::string& params, int d, double budget, const ApproxSettings& settings,
               bool emit_network)
{
    json p = params.empty() ? json::object() : json::parse(params);
    const LabelField field(make_base_function(base, p, d));
    const BaseApproximation approx = approximate(field, budget, settings);
    ordered_json out;
    out["base"] = field.base().id();
    out["certificate"] = approx.certificate.to_json();
    out["network_widths"] = approx.network.widths();
    if (emit_network)
        out["network"] = network_to_json(approx.network);
    std::cout << out.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact-on-X ReLU network construction with an L1 budget"};
    app.set_version_flag("--version", CHOICENET_VERSION);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    unsigned workers = 0;
    auto* run = app.add_subcommand("run", "Run an experiment config and write its report");
    run->add_option("config", config_path, "Config file (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--workers", workers, "Worker threads (0: all cores)");
    run->add_option("--out", out_dir, "Output directory");

    std::string report_path;
    auto* ver = app.add_subcommand("verify", "Re-check every assertion of a report");
    ver->add_option("report", report_path, "report.json")->required()->check(CLI::ExistingFile);

    std::vector<double> center;
    double residual = 1.0;
    std::uint64_t resolution = 4;
    auto* spike = app.add_subcommand("build-spike", "Build one spike network");
    spike->add_option("--center", center, "Center coordinates")->required();
    spike->add_option("--residual", residual, "Peak value");
    spike->add_option("--n", resolution, "Resolution");

    std::string nu = "poisson:5";
    int dim = 1;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    auto* sample = app.add_subcommand("sample", "Draw one finite random set");
    sample->add_option("--nu", nu, "fixed:K | poisson:MEAN | geometric:P");
    sample->add_option("--d", dim, "Dimension")->check(CLI::Range(1, 16));
    sample->add_option("--seed", seed, "Seed");
    sample->add_option("--stream", stream, "Stream (trial index)");

    std::string base = "sin2pi";
    std::string params;
    double budget = 0.01;
    ApproxSettings settings;
    bool emit_network = false;
    auto* approx = app.add_subcommand("approx", "Certified L1 approximation of a registry base");
    approx->add_option("--base", base, "Registry base name");
    approx->add_option("--params", params, "Base parameters as a JSON object");
    approx->add_option("--d", dim, "Dimension")->check(CLI::Range(1, 16));
    approx->add_option("--budget", budget, "L1 budget");
    approx->add_option("--seed", settings.seed, "Certificate seed");
    approx->add_option("--samples", settings.samples, "Certificate Monte Carlo samples");
    approx->add_option("--max-refinements", settings.max_refinements, "Largest grid is 2^this");
    approx->add_flag("--emit-network", emit_network, "Include the serialized network");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run)
            return cmd_run(config_path, workers, out_dir);
        if (*ver)
            return cmd_verify(report_path);
        if (*spike)
            return cmd_build_spike(center, residual, resolution);
        if (*sample)
            return cmd_sample(nu, dim, seed, stream);
        if (*approx)
            return cmd_approx(base, params, dim, budget, settings, emit_network);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
