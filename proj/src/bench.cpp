#include "apf/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include "apf/errors.hpp"
#include "apf/fit.hpp"
#include "apf/io.hpp"

namespace apf::bench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::pair<std::string, std::string>> parse_options(std::string_view text, std::string_view context) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t pos = 0;
    while (pos <= text.size() && !text.empty()) {
        auto end = text.find(',', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto item = text.substr(pos, end - pos);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos || eq == 0)
            throw ContractError("bad option '" + std::string(item) + "' in '" + std::string(context) + "'");
        out.emplace_back(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
        pos = end + 1;
    }
    return out;
}

double to_real(const std::string& v, const std::string& key) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || v.empty()) throw ContractError("option '" + key + "' needs a number, got '" + v + "'");
    return x;
}

std::uint64_t to_uint(const std::string& v, const std::string& key) {
    std::size_t used = 0;
    unsigned long long x = 0;
    try {
        x = std::stoull(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || v.empty() || v.front() == '-')
        throw ContractError("option '" + key + "' needs a non-negative integer, got '" + v + "'");
    return x;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

MethodSpec parse_method(std::string_view text) {
    MethodSpec spec;
    spec.label = std::string(text);
    const auto colon = text.find(':');
    const auto name = text.substr(0, colon);
    const auto rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    if (name == "daa") spec.engine = Engine::daa;
    else if (name == "astar") spec.engine = Engine::astar;
    else if (name == "dijkstra") spec.engine = Engine::dijkstra;
    else if (name == "theta") spec.engine = Engine::theta;
    else if (name == "random-walk") spec.engine = Engine::random_walk;
    else if (name == "focal") spec.engine = Engine::focal;
    else throw ContractError("unknown method '" + std::string(name) + "'");

    for (const auto& [key, value] : parse_options(rest, text)) {
        const bool angular = spec.engine == Engine::daa || spec.engine == Engine::random_walk;
        if (key == "preset" && angular) {
            spec.params = fit::presets(value);
            spec.preset = value;
        } else if (key == "alpha" && angular) spec.params.alpha = to_real(value, key);
        else if (key == "lambda" && angular) spec.params.lambda = to_real(value, key);
        else if (key == "kappa" && spec.engine == Engine::daa) spec.params.kappa = to_real(value, key);
        else if (key == "k" && spec.engine == Engine::random_walk) {
            spec.k = static_cast<int>(to_uint(value, key));
            if (spec.k < 1) throw ContractError("random-walk k must be >= 1");
        } else if (key == "seed" && spec.engine == Engine::random_walk) spec.seed = to_uint(value, key);
        else if (key == "w" && spec.engine == Engine::focal) spec.w = to_real(value, key);
        else throw ContractError("option '" + key + "' does not apply to method '" + std::string(name) + "'");
    }
    if (spec.engine == Engine::random_walk) spec.params.kappa = 0.0;
    if (spec.engine == Engine::daa || spec.engine == Engine::random_walk) spec.params.validate();
    return spec;
}

MethodRun run_method(const MethodSpec& spec, const ProblemInstance& instance, double sigma) {
    MethodRun run;
    switch (spec.engine) {
        case Engine::daa: run.outcome = daa_star(instance, spec.params, sigma); break;
        case Engine::astar: run.outcome = classic_astar(instance, sigma); break;
        case Engine::dijkstra: run.outcome = dijkstra(instance); break;
        case Engine::random_walk:
            run.outcome = random_walk_search(instance, spec.params, sigma, spec.k, spec.seed);
            break;
        case Engine::focal:
            run.outcome = focal_search(instance.map, instance.source, instance.target, spec.w, sigma);
            break;
        case Engine::theta: {
            auto theta = theta_star(instance, sigma);
            run.outcome = std::move(theta.outcome);
            if (run.outcome.path) run.waypoints = std::move(theta.waypoints);
            break;
        }
    }
    return run;
}

std::uint64_t instance_seed(std::uint64_t seed, std::size_t index) {
    return splitmix64(splitmix64(seed) + index);
}

std::vector<DatasetEntry> generate_dataset(const GeneratorSpec& spec) {
    if (spec.count < 1) throw ContractError("dataset count must be >= 1");
    std::vector<DatasetEntry> out;
    out.reserve(static_cast<std::size_t>(spec.count));
    for (int i = 0; i < spec.count; ++i) {
        MazeOptions opt;
        opt.height = spec.height;
        opt.width = spec.width;
        opt.obstacle_density = spec.density;
        opt.seed = instance_seed(spec.seed, static_cast<std::size_t>(i));
        char id[32];
        std::snprintf(id, sizeof id, "inst_%04d", i);
        try {
            out.push_back({id, generate_maze(opt)});
        } catch (const DataError& e) {
            throw DataError(std::string(id) + ": " + e.what());
        }
    }
    return out;
}

std::vector<DatasetEntry> load_dataset(const std::string& spec) {
    if (spec.rfind("gen:", 0) == 0) {
        GeneratorSpec g;
        for (const auto& [key, value] : parse_options(std::string_view(spec).substr(4), spec)) {
            if (key == "count") g.count = static_cast<int>(to_uint(value, key));
            else if (key == "height") g.height = static_cast<int>(to_uint(value, key));
            else if (key == "width") g.width = static_cast<int>(to_uint(value, key));
            else if (key == "density") g.density = to_real(value, key);
            else if (key == "seed") g.seed = to_uint(value, key);
            else throw ContractError("unknown generator option '" + key + "'");
        }
        return generate_dataset(g);
    }
    fs::path manifest = spec;
    if (fs::is_directory(manifest)) manifest /= "manifest.json";
    json j;
    try {
        j = json::parse(io::read_text(manifest));
    } catch (const json::parse_error& e) {
        throw DataError(manifest.string() + ": " + e.what());
    }
    if (!j.contains("instances") || !j["instances"].is_array())
        throw DataError(manifest.string() + ": missing 'instances' array");
    std::vector<DatasetEntry> out;
    for (const auto& item : j["instances"]) {
        if (!item.is_string()) throw DataError(manifest.string() + ": instance entries must be file names");
        const fs::path file = manifest.parent_path() / item.get<std::string>();
        out.push_back({file.stem().string(), io::load_instance(file).instance});
    }
    if (out.empty()) throw DataError(manifest.string() + ": dataset is empty");
    return out;
}

unsigned worker_count(unsigned requested) {
    unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* cap = std::getenv("APF_THREADS")) {
        const long v = std::strtol(cap, nullptr, 10);
        if (v >= 1) n = std::min(n, static_cast<unsigned>(v));
    }
    return std::max(1u, n);
}

BenchReport run_bench(const BenchConfig& config, const std::vector<DatasetEntry>& dataset) {
    if (config.methods.empty()) throw ContractError("bench needs at least one method");
    if (dataset.empty()) throw ContractError("bench dataset is empty");
    std::vector<MethodSpec> specs;
    for (const auto& m : config.methods) specs.push_back(parse_method(m));
    for (const auto& e : dataset)
        if (!e.instance.reference) throw DataError("instance " + e.id + " has no reference path");

    // Column 0 is the A* baseline used for Ep; columns 1..M the configured methods.
    const MethodSpec baseline = parse_method("astar");
    const std::size_t cols = specs.size() + 1;
    const std::size_t cells = dataset.size() * cols;
    std::vector<MethodRun> runs(cells);
    std::vector<double> seconds(cells, 0.0);
    std::vector<std::exception_ptr> errors(cells);
    std::atomic<std::size_t> next{0};

    const auto worker = [&] {
        for (std::size_t cell = next++; cell < cells; cell = next++) {
            const std::size_t inst = cell / cols;
            const std::size_t col = cell % cols;
            const MethodSpec& spec = col == 0 ? baseline : specs[col - 1];
            const auto t0 = std::chrono::steady_clock::now();
            try {
                runs[cell] = run_method(spec, dataset[inst].instance, config.sigma);
            } catch (...) {
                errors[cell] = std::current_exception();
            }
            seconds[cell] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    const unsigned workers = std::min<std::size_t>(worker_count(config.threads), cells);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (std::size_t cell = 0; cell < cells; ++cell) {
        if (!errors[cell]) continue;
        const auto& id = dataset[cell / cols].id;
        try {
            std::rethrow_exception(errors[cell]);
        } catch (const InternalError& e) {
            throw InternalError("instance " + id + ": " + e.what());
        } catch (const std::exception& e) {
            throw DataError("instance " + id + ": " + e.what());
        }
    }

    BenchReport report;
    report.config = config;
    std::vector<std::vector<metrics::InstanceMetrics>> rows(specs.size());
    std::vector<const Path*> column(specs.size());
    for (std::size_t inst = 0; inst < dataset.size(); ++inst) {
        const auto& entry = dataset[inst];
        const Path& ref = *entry.instance.reference;
        const SearchTrace& astar = runs[inst * cols].outcome.trace;
        for (std::size_t j = 0; j < specs.size(); ++j) {
            const auto& run = runs[inst * cols + j + 1];
            if (!run.outcome.path)
                throw DataError("instance " + entry.id + ": method '" + specs[j].label + "' did not reach the target");
            column[j] = &*run.outcome.path;
        }
        const auto asim = metrics::asim_terms(column, ref);
        for (std::size_t j = 0; j < specs.size(); ++j) {
            const auto& run = runs[inst * cols + j + 1];
            const Path& pred = *run.outcome.path;
            metrics::InstanceMetrics m;
            m.instance_id = entry.id;
            m.spr = pred.size() <= ref.size() ? 1.0 : 0.0;
            m.psim = metrics::psim_term(pred, ref);
            m.asim = asim[j];
            const auto cd = metrics::chamfer_term(pred, ref);
            m.cd = cd.literal;
            m.cd_normalized = cd.normalized;
            m.hist = metrics::hist(run.outcome.trace, entry.instance.map);
            m.ep = metrics::ep(run.outcome.trace, astar);
            m.path_loss = metrics::path_loss(run.outcome.trace, ref);
            rows[j].push_back(std::move(m));
        }
    }
    for (std::size_t j = 0; j < specs.size(); ++j) {
        double total = 0.0;
        for (std::size_t inst = 0; inst < dataset.size(); ++inst) total += seconds[inst * cols + j + 1];
        report.methods.push_back({specs[j], metrics::summarize(std::move(rows[j])), total});
    }
    return report;
}

std::string bench_csv(const BenchReport& report) {
    std::string out = "# dataset=" + report.config.dataset + "\n# sigma=" + io::format_real(report.config.sigma) +
                      "\n# asim_methods=";
    for (std::size_t j = 0; j < report.methods.size(); ++j) {
        if (j) out += ';';
        out += report.methods[j].spec.label;
    }
    out += "\nmethod,instance_id,spr,psim,asim,cd,cd_normalized,hist,ep,path_loss\n";
    for (const auto& m : report.methods) {
        for (const auto& row : m.report.per_instance)
            out += csv_field(m.spec.label) + "," + csv_field(row.instance_id) + "," + io::metrics_csv_fields(row) + "\n";
        out += csv_field(m.spec.label) + "," + m.report.aggregate.instance_id + "," +
               io::metrics_csv_fields(m.report.aggregate) + "\n";
    }
    return out;
}

json bench_json(const BenchReport& report) {
    json j;
    j["config"] = {{"dataset", report.config.dataset},
                   {"methods", report.config.methods},
                   {"sigma", report.config.sigma},
                   {"format", report.config.format == ReportFormat::csv ? "csv" : "json"}};
    json labels = json::array();
    for (const auto& m : report.methods) labels.push_back(m.spec.label);
    j["asim_methods"] = labels;
    json methods = json::array();
    for (const auto& m : report.methods) {
        json rows = json::array();
        for (const auto& row : m.report.per_instance) rows.push_back(io::metrics_to_json(row));
        json entry{{"method", m.spec.label},
                   {"wall_clock_seconds", m.wall_clock_seconds},
                   {"aggregate", io::metrics_to_json(m.report.aggregate)},
                   {"per_instance", std::move(rows)}};
        if (m.spec.engine == Engine::daa || m.spec.engine == Engine::random_walk)
            entry["params"] = {{"alpha", m.spec.params.alpha}, {"lambda", m.spec.params.lambda},
                               {"kappa", m.spec.params.kappa}};
        methods.push_back(std::move(entry));
    }
    j["methods"] = std::move(methods);
    return j;
}

}  // namespace apf::bench
