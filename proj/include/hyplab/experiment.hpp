#pragma once

// Seeded Monte-Carlo over brick perturbations of a base map, with per-sample
// census sweeps, fitted growth constants and plain-text reports.
//
// Config schema (JSON):
//   {
//     "map":    {"dim": 1, "domain_radius": R, "coefficients": [c0, c1, ...]}
//               or {"dim": N, "domain_radius": R,
//                   "components": [[{"exponents": [..], "coeff": c}, ...], ...]},
//     "brick":  {"family": "factorial", "tau": t, "k_max": K} | geometric | custom | empty,
//     "rho": 1.0, "deltas": [1.0], "n_max": 8, "samples": 50, "master_seed": 1,
//     "force_zero_perturbation": false,
//     "ih": {"enabled": true, "C": 1.0, "delta": 1.0},
//     "census": {"tol": 1e-12, "min_width": 1e-10, "max_cells": 4000000},
//     "output": {"dir": ".", "records": "samples.jsonl", "table": "table.csv",
//                "summary": "summary.json"},
//     "threads": 0
//   }
// Only "map" is required. threads = 0 means HYPLAB_THREADS, else the hardware count.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyplab/census.hpp"
#include "hyplab/dynamics.hpp"
#include "hyplab/perturbation.hpp"
#include "hyplab/polynomial.hpp"

namespace hyplab {

PolynomialMap map_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PolynomialMap& f);

struct OutputPaths {
    std::string dir = ".";
    std::string records = "samples.jsonl";
    std::string table = "table.csv";
    std::string summary = "summary.json";
};

struct ExperimentConfig {
    PolynomialMap base_map = PolynomialMap::univariate({-1.0, 0.0, 1.0});
    BrickSpec brick = BrickSpec::empty();
    double rho = 1.0;
    std::vector<double> deltas{1.0};
    int n_max = 4;
    int sample_count = 1;
    std::uint64_t master_seed = 1;
    bool force_zero_perturbation = false;
    bool ih_enabled = true;
    GrowthParams ih;
    CensusOptions census;
    OutputPaths output;
    int threads = 0;

    int dim() const { return base_map.dim(); }
    /// Throws ConfigError on the first violated invariant.
    void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

struct StageRecord {
    int n = 0;
    std::size_t count = 0;
    double gamma = 0.0;
    bool certified = false;
};

struct FittedC {
    double delta = 1.0;
    double value = 0.0;  // +inf when some gamma_n <= 0 or a stage is missing
};

struct SampleReport {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    bool aborted = false;
    std::string error;
    bool condition_b = false;     // f_eps maps the domain into its interior
    double into_margin = 0.0;
    std::vector<StageRecord> stages;
    std::vector<FittedC> fitted;
    int ih_pass = 0;
    std::string ih_status;

    /// every stage ran and was certified, and condition B holds
    bool certified() const;
};

struct DeltaSummary {
    double delta = 1.0;
    std::size_t finite = 0;
    double max = 0.0;     // over finite values
    double median = 0.0;  // over finite values
};

struct ExperimentSummary {
    std::size_t samples = 0;
    std::size_t aborted = 0;
    std::size_t uncertified = 0;
    std::size_t ih_failing = 0;
    std::vector<DeltaSummary> fitted;
};

struct ExperimentResult {
    ExperimentSummary summary;
    std::vector<SampleReport> samples;
};

/// Smallest C with gamma_n >= exp(-C n^{1+delta}) for the observed
/// gammas[0] = gamma_1, ...; non-positive entries give +inf, +inf entries
/// (no periodic points) impose nothing.
double fit_C(std::span<const double> gammas, double delta);

SampleReport run_sample(const ExperimentConfig& config, std::size_t index);
ExperimentResult run_experiment(const ExperimentConfig& config);
ExperimentSummary summarize(const ExperimentConfig& config, const std::vector<SampleReport>& samples);

/// Worker count: explicit > 0, else HYPLAB_THREADS, else hardware concurrency.
int resolve_threads(int requested);

// ---------------------------------------------------------------- reports

inline constexpr const char* kTableHeader = "sample,n,P_n,gamma_n,certified";

nlohmann::json to_json(const SampleReport& s);
nlohmann::json to_json(const ExperimentSummary& s);
std::string format_records(const ExperimentResult& r);
std::string format_table(const ExperimentResult& r);
std::string format_summary(const ExperimentResult& r);

/// Writes the three report files below paths.dir; throws Error naming the path.
void emit_reports(const ExperimentResult& r, const OutputPaths& paths);

struct TableRow {
    std::size_t sample = 0;
    int n = 0;
    std::size_t count = 0;
    double gamma = 0.0;
    bool certified = false;
};

std::vector<TableRow> parse_table(std::istream& in);

/// One JSON line per periodic point, then a closing line with the totals.
std::string format_census(const CensusResult& c);

/// %.17g, with "inf" / "-inf" / "nan" for non-finite values
std::string format_double(double v);
/// JSON number, or the strings above when not finite
nlohmann::json json_number(double v);

}  // namespace hyplab
