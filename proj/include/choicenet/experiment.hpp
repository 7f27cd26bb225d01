#ifndef CHOICENET_EXPERIMENT_HPP
#define CHOICENET_EXPERIMENT_HPP

// Config-driven experiment runner: sample X, mask, fit, check exactness on X
// and the L1 budget, and write a self-contained report (JSON + CSV + SVG).

#include "choicenet/choice_oracle.hpp"
#include "choicenet/label_field.hpp"
#include "choicenet/predictor.hpp"
#include "choicenet/quadrature.hpp"
#include "choicenet/sampler.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace choicenet {

/// Config problem, located by line/column (syntax) or JSON pointer (content).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class VerificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    int dim = 1;
    double epsilon = 0.1;
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
    LabelField field = LabelField(make_base_function("identity", nlohmann::json::object(), 1));
    OracleKind oracle;
    SizeDistribution nu = SizeDistribution::poisson(5.0);
    QuadratureMethod method = QuadratureMethod::monte_carlo;
    std::uint64_t samples = 200000;              // L1 budget check
    std::uint64_t certificate_samples = 1 << 18;  // base approximation certificate
    double grid_bound_factor = 0.05;
    int max_refinements = 12;
    std::uint64_t max_nodes = 200000;
    bool emit_networks = true;
    std::uint64_t figure_trials = 1;
    std::string output_dir;  // empty: caller decides

    PredictorConfig predictor() const;
    /// Normalized echo with every default filled in.
    nlohmann::ordered_json to_json() const;
};

ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Seeds derived from the master seed; recorded in reports for replay.
std::uint64_t sampler_seed(std::uint64_t seed);
std::uint64_t certificate_seed(std::uint64_t seed);
std::uint64_t budget_check_seed(std::uint64_t seed, std::uint64_t trial);

struct RunOptions {
    unsigned workers = 0;  // 0: hardware concurrency
};

struct ExperimentReport {
    nlohmann::ordered_json document;
    std::string per_point_csv;
    std::map<std::string, std::string> figures;  // file name -> SVG text
    bool all_pass = false;

    /// The report JSON without the "run_info" block (timestamp, wall clock).
    std::string deterministic_text() const;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

/// Writes report.json, per_point.csv and figures into `dir`.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);

/// Default output directory: $CHOICENET_OUTPUT_DIR, else ./choicenet_out.
std::filesystem::path default_output_root();

struct AssertionResult {
    std::string name;
    std::int64_t trial;  // -1 for run-level assertions
    bool pass;
    std::string detail;
};

struct VerifyResult {
    std::vector<AssertionResult> assertions;
    bool all_pass() const;
};

/// Re-checks every assertion recorded in a report by re-evaluating the
/// serialized networks.
VerifyResult verify(const nlohmann::json& report);
VerifyResult verify_file(const std::filesystem::path& report_path);

}  // namespace choicenet

#endif  // CHOICENET_EXPERIMENT_HPP
