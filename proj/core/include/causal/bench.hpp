#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "causal/counterfactual.hpp"
#include "causal/discovery.hpp"
#include "causal/gbn.hpp"
#include "causal/metrics.hpp"

namespace causal {

struct AlgoSpec {
    std::string id;  // "pc", "ges", "fci"
    DiscoveryOptions opts;
};

/// Benchmark configuration; loadable from JSON, overridable from CLI flags.
struct BenchConfig {
    std::optional<std::uint64_t> seed;
    bool simulate = false;
    std::optional<std::string> manifest_path;
    std::vector<AlgoSpec> algorithms;
    std::vector<double> grid;
    std::optional<std::string> truth_path;
    std::set<std::string> metrics{"structural", "predictive"};
    std::string out_dir = "bench_out";
    double timeout_seconds = 3600.0;
};

BenchConfig bench_config_from_json(const std::string& text, const std::string& base_dir);

/// Expands "start:step:end" into an inclusive grid.
std::vector<double> parse_grid_spec(const std::string& spec);

/// Validates invariants: at least one algorithm, grid inside [0,1] and
/// strictly increasing, seed present when simulating.
void validate_config(const BenchConfig& config);

/// File layout of a stored benchmark dataset.
struct Manifest {
    struct InterventionEntry {
        std::string node;
        double value = 0.0;
        std::string path;
    };
    std::string observational;
    std::vector<InterventionEntry> interventions;
    std::optional<std::string> truth;
    std::optional<std::string> model;
    std::optional<std::string> counterfactual;
    std::string base_dir;

    std::string resolve(const std::string& path) const;
};

Manifest load_manifest(const std::string& path);

/// Materializes the simulated benchmark: a random 10-node model, 10000
/// observational samples, 1000 knockout (clamp-to-zero) samples per node,
/// plus truth/model JSON and a manifest referencing all files.
Manifest simulate_benchmark_dataset(std::uint64_t seed, const std::string& out_dir);

/// Weight-shift counterfactual scenario on a simulated benchmark model: the
/// first node with both parents and children gets the weight from its first
/// parent shifted by half its own noise standard deviation (scaled by the
/// parent's mean); targets are the node's children, and interventional data
/// is sampled under the shift.
CounterfactualQuery simulated_counterfactual_query(const GbnModel& model, const Dataset& obs,
                                                   std::uint64_t seed);

/// Runs the configured algorithms end to end and writes report.csv,
/// report.md, graphs/*.json and metadata.json into the output directory.
/// Returns 0 on success, 3 when some algorithm rows failed or timed out.
int run_benchmark(const BenchConfig& config);

}  // namespace causal
