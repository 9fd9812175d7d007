#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "apf/geometry.hpp"
#include "apf/gridmap.hpp"
#include "apf/metrics.hpp"
#include "apf/search.hpp"

namespace apf::bench {

enum class Engine { daa, astar, dijkstra, theta, random_walk, focal };

/// A method as written on the command line, e.g. `daa:alpha=0.3,kappa=0.8`,
/// `daa:preset=mpd/daa-mix`, `random-walk:k=3,seed=7` or `focal:w=2`.
struct MethodSpec {
    std::string label;
    Engine engine = Engine::daa;
    PafParams params;
    std::optional<std::string> preset;
    int k = 3;
    std::uint64_t seed = 0;
    double w = kDefaultFocalWeight;
};

[[nodiscard]] MethodSpec parse_method(std::string_view text);

struct MethodRun {
    SearchOutcome outcome;    // for Theta* the path is the rasterised route
    std::optional<Path> waypoints;
};

[[nodiscard]] MethodRun run_method(const MethodSpec& spec, const ProblemInstance& instance, double sigma);

struct DatasetEntry {
    std::string id;
    ProblemInstance instance;
};

struct GeneratorSpec {
    int count = 10;
    int height = 32;
    int width = 32;
    double density = 0.3;
    std::uint64_t seed = 0;
};

/// Per-instance generator seed derived from the dataset seed.
[[nodiscard]] std::uint64_t instance_seed(std::uint64_t seed, std::size_t index);
[[nodiscard]] std::vector<DatasetEntry> generate_dataset(const GeneratorSpec& spec);

/// `gen:count=..,height=..,width=..,density=..,seed=..`, a directory holding
/// manifest.json, or a manifest file.
[[nodiscard]] std::vector<DatasetEntry> load_dataset(const std::string& spec);

enum class ReportFormat { csv, json };

struct BenchConfig {
    std::string dataset;
    std::vector<std::string> methods;
    double sigma = kDefaultSigma;
    std::string output;
    ReportFormat format = ReportFormat::csv;
    unsigned threads = 0;  // 0: hardware concurrency, capped by APF_THREADS
};

struct MethodReport {
    MethodSpec spec;
    metrics::MetricsReport report;
    double wall_clock_seconds = 0.0;
};

struct BenchReport {
    BenchConfig config;
    std::vector<MethodReport> methods;
};

/// Runs every method on every instance. Ep is always measured against a
/// classic A* run on the same instance; ASIM is normalised over exactly the
/// configured methods.
[[nodiscard]] BenchReport run_bench(const BenchConfig& config, const std::vector<DatasetEntry>& dataset);

[[nodiscard]] std::string bench_csv(const BenchReport& report);
[[nodiscard]] nlohmann::json bench_json(const BenchReport& report);

/// Worker count honouring the APF_THREADS cap.
[[nodiscard]] unsigned worker_count(unsigned requested);

}  // namespace apf::bench
