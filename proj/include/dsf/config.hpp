#pragma once

#include "dsf/graphs.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dsf {

enum class InitialCondition { uncorrelated, localized };

/// Which dynamics to run. `automatic` picks the exact fast sampler on complete
/// graphs when no m(t) trace is requested, the A/B engine otherwise.
enum class EngineKind { automatic, fast, ab, piles };

enum class SweepTopology { ring, torus, complete, random_regular };

/// Family of graphs for a size scan. `sizes` are L for rings and tori and V
/// for complete and random regular graphs; they must be strictly increasing.
struct SweepSpec {
    SweepTopology topology = SweepTopology::ring;
    std::uint32_t d = 1;
    std::uint32_t r = 3;
    std::uint64_t graph_seed = 0;
    std::vector<std::uint64_t> sizes;

    GraphSpec graph_for(std::uint64_t size) const;
};

struct Observables {
    bool halting = true;
    bool last_step = true;
    bool trace = false;
};

struct AnalysisOptions {
    std::optional<std::vector<double>> mean_times;
    std::optional<std::vector<double>> fano_times;
    std::optional<std::vector<double>> gaussian_times;
    std::optional<std::pair<double, double>> decay_window;
    std::optional<std::pair<double, double>> early_window;
    int moments_p_max = 8;
};

struct OutputPaths {
    std::string halting_csv = "halting.csv";
    std::string trace_csv = "trace.csv";
    std::string scaling_csv = "scaling.csv";
    std::string report_json = "report.json";
};

struct ExperimentConfig {
    std::optional<GraphSpec> graph;
    std::optional<SweepSpec> sweep;
    InitialCondition initial_condition = InitialCondition::uncorrelated;
    Vertex localized_vertex = 0;
    std::uint64_t replicas = 0;
    std::optional<std::uint64_t> seed;
    unsigned workers = 1;
    EngineKind engine = EngineKind::automatic;
    std::vector<double> trace_times;
    Observables observables;
    AnalysisOptions analysis;
    std::uint64_t max_events = 10'000'000'000ULL;
    std::size_t bootstrap_resamples = 1000;
    OutputPaths outputs;
};

/// Strict schema: unknown keys, wrong types and out-of-range values raise
/// ConfigError naming the JSON path of the offending field.
ExperimentConfig parse_config(const nlohmann::json& doc);
/// Graph object such as {"kind": "torus", "d": 2, "L": 16}; `where` prefixes
/// error fields.
GraphSpec parse_graph_spec(const nlohmann::json& v, const std::string& where = "graph");
/// Parses JSON text; syntax errors are reported with line and column.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON form (sorted keys, every field explicit).
nlohmann::json config_to_json(const ExperimentConfig& config);
/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

std::string to_string(InitialCondition ic);
std::string to_string(EngineKind engine);

} // namespace dsf
