#include "apf/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "apf/bench.hpp"
#include "apf/errors.hpp"
#include "apf/fit.hpp"
#include "apf/io.hpp"
#include "apf/metrics.hpp"
#include "apf/render.hpp"
#include "apf/search.hpp"

namespace apf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

NodeId parse_node(const std::string& text) {
    int r = 0, c = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%d,%d%c", &r, &c, &tail) != 2)
        throw ContractError("expected 'row,col', got '" + text + "'");
    return {r, c};
}

json load_config(const std::string& file) {
    if (file.empty()) return json::object();
    try {
        auto j = json::parse(io::read_text(file));
        if (!j.is_object()) throw DataError(file + ": config must be a JSON object");
        return j;
    } catch (const json::exception& e) {
        throw DataError(file + ": " + e.what());
    }
}

// Fill `value` from the config when the flag was not given on the command line.
template <typename T>
void from_config(const json& config, const char* key, const CLI::Option* flag, T& value) {
    if (flag->count() > 0 || !config.contains(key)) return;
    try {
        value = config.at(key).get<T>();
    } catch (const json::exception& e) {
        throw DataError(std::string("config key '") + key + "': " + e.what());
    }
}

std::string format_params(const PafParams& p) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%.3f, %.3f, %.3f)", p.alpha, p.lambda, p.kappa);
    return buf;
}

struct GenArgs {
    bench::GeneratorSpec spec;
    std::string out_dir;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
    const auto dataset = bench::generate_dataset(a.spec);
    const fs::path dir = a.out_dir;
    fs::create_directories(dir);
    json manifest;
    manifest["generator"] = {{"count", a.spec.count},     {"height", a.spec.height}, {"width", a.spec.width},
                             {"density", a.spec.density}, {"seed", a.spec.seed}};
    json files = json::array();
    for (const auto& entry : dataset) {
        const std::string map_name = entry.id + ".map";
        io::write_text(dir / map_name, write_movingai(entry.instance.map));
        io::save_instance(dir / (entry.id + ".json"), map_name, entry.instance);
        files.push_back(entry.id + ".json");
    }
    manifest["instances"] = std::move(files);
    io::write_text(dir / "manifest.json", manifest.dump(1) + "\n");
    out << "wrote " << dataset.size() << " instances to " << dir.string() << "\n";
    return kSuccess;
}

struct SolveArgs {
    std::string instance;
    std::string method = "daa";
    double sigma = kDefaultSigma;
    bool render = false;
    std::string ppm;
    std::string json_out;
    bool full_trace = false;
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
    const auto file = io::load_instance(a.instance);
    const auto& instance = file.instance;
    const auto spec = bench::parse_method(a.method);
    const auto run = bench::run_method(spec, instance, a.sigma);
    const auto& outcome = run.outcome;

    out << "method: " << spec.label << "\n";
    if (spec.engine == bench::Engine::daa || spec.engine == bench::Engine::random_walk)
        out << "params: " << format_params(spec.params) << "\n";
    out << "status: " << io::to_string(outcome.terminated_by) << "\n";
    if (outcome.path) out << "path_length: " << outcome.path->size() << "\n";
    if (run.waypoints) out << "waypoints: " << run.waypoints->size() << "\n";
    out << "expansions: " << outcome.trace.expansions << "\n";
    out << "hist: " << io::format_real(metrics::hist(outcome.trace, instance.map)) << "\n";
    if (outcome.path && instance.reference)
        out << "path_loss: " << io::format_real(metrics::path_loss(outcome.trace, *instance.reference)) << "\n";
    if (a.render) out << render_ascii(instance, outcome);
    if (!a.ppm.empty()) io::write_text(a.ppm, render_ppm(instance, outcome));
    if (!a.json_out.empty()) {
        auto j = io::outcome_to_json(outcome, a.full_trace);
        j["method"] = spec.label;
        if (run.waypoints) j["waypoints"] = io::path_to_json(*run.waypoints);
        io::write_text(a.json_out, j.dump(1) + "\n");
    }
    if (!outcome.path) {
        err << "unreachable: target cannot be reached from source\n";
        return kDataError;
    }
    return kSuccess;
}

int cmd_bench(const bench::BenchConfig& config, std::ostream& out) {
    const auto dataset = bench::load_dataset(config.dataset);
    const auto report = bench::run_bench(config, dataset);
    const std::string body =
        config.format == bench::ReportFormat::csv ? bench::bench_csv(report) : bench::bench_json(report).dump(1) + "\n";
    if (config.output.empty()) out << body;
    else io::write_text(config.output, body);
    for (const auto& m : report.methods) {
        const auto& a = m.report.aggregate;
        char line[256];
        std::snprintf(line, sizeof line, "%-28s spr=%.4f psim=%.4f asim=%.4f cd=%.3f hist=%.4f ep=%.4f (%.3fs)\n",
                      m.spec.label.c_str(), a.spr, a.psim, a.asim, a.cd, a.hist, a.ep, m.wall_clock_seconds);
        if (!config.output.empty()) out << line;
    }
    return kSuccess;
}

struct FitArgs {
    std::string train;
    std::string eval;
    fit::FitConfig config;
    std::string preset;
    std::string out_file;
    std::string curve_file;
};

std::vector<ProblemInstance> instances_of(const std::vector<bench::DatasetEntry>& entries) {
    std::vector<ProblemInstance> out;
    for (const auto& e : entries) {
        if (!e.instance.reference) throw DataError("instance " + e.id + " has no reference path");
        out.push_back(e.instance);
    }
    return out;
}

int cmd_fit(FitArgs a, std::ostream& out) {
    if (!a.preset.empty()) a.config.preset = a.preset;
    a.config.threads = bench::worker_count(a.config.threads);
    const auto train = instances_of(bench::load_dataset(a.train));
    auto result = fit::fit(train, a.config);
    if (!a.eval.empty()) result.eval_loss = fit::objective(result.params, instances_of(bench::load_dataset(a.eval)),
                                                          a.config.sigma);
    out << "params: " << format_params(result.params) << "\n";
    out << "train_loss: " << io::format_real(result.train_loss) << "\n";
    if (result.eval_loss) out << "eval_loss: " << io::format_real(*result.eval_loss) << "\n";
    out << "evaluations: " << result.evaluations << "\n";
    if (!a.out_file.empty()) {
        auto j = io::fit_result_to_json(result);
        j["config"] = {{"train", a.train},
                       {"eval", a.eval},
                       {"grid_step", a.config.grid_step},
                       {"refine_iters", a.config.refine_iters},
                       {"refine_shrink", a.config.refine_shrink},
                       {"kappa_max", a.config.kappa_max},
                       {"sigma", a.config.sigma},
                       {"seed", a.config.seed},
                       {"preset", a.config.preset ? json(*a.config.preset) : json(nullptr)}};
        io::write_text(a.out_file, j.dump(1) + "\n");
    }
    if (!a.curve_file.empty()) io::write_text(a.curve_file, io::fit_curve_csv(result));
    return kSuccess;
}

struct ConvertArgs {
    std::string map;
    std::string instance;
    std::string source;
    std::string target;
    std::string out_file;
    bool no_reference = false;
};

int cmd_convert(const ConvertArgs& a, std::ostream& out) {
    if (a.out_file.empty()) throw ContractError("convert needs --out");
    if (!a.instance.empty()) {
        const auto file = io::load_instance(a.instance);
        io::write_text(a.out_file, write_movingai(file.instance.map));
        out << "wrote map " << a.out_file << "\n";
        return kSuccess;
    }
    if (a.map.empty() || a.source.empty() || a.target.empty())
        throw ContractError("convert needs --instance, or --map with --source and --target");
    ProblemInstance instance{io::load_map_file(a.map), parse_node(a.source), parse_node(a.target), std::nullopt};
    validate_instance(instance);
    if (!a.no_reference) {
        auto ref = dijkstra(instance);
        if (!ref.path) throw DataError("unreachable: no reference path between source and target");
        instance.reference = std::move(ref.path);
    }
    const fs::path out_path = a.out_file;
    const fs::path base = out_path.has_parent_path() ? out_path.parent_path() : fs::path(".");
    const auto rel = fs::relative(fs::absolute(a.map), fs::absolute(base)).generic_string();
    io::save_instance(out_path, rel, instance);
    out << "wrote instance " << a.out_file << "\n";
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Angular A* grid pathfinding: search engines, metrics and weight fitting", "apf"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Generate random maze instances with Dijkstra references");
    g->add_option("--count", gen.spec.count, "Number of instances")->capture_default_str();
    g->add_option("--height", gen.spec.height, "Rows")->capture_default_str();
    g->add_option("--width", gen.spec.width, "Columns")->capture_default_str();
    g->add_option("--density", gen.spec.density, "Obstacle density in [0,1)")->capture_default_str();
    g->add_option("--seed", gen.spec.seed, "Dataset seed")->capture_default_str();
    g->add_option("--out", gen.out_dir, "Output directory")->required();

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Solve one instance and report or render the result");
    s->add_option("--instance", solve.instance, "Instance JSON file")->required();
    s->add_option("--method", solve.method, "Method spec, e.g. daa:preset=mpd/daa-mix")->capture_default_str();
    s->add_option("--sigma", solve.sigma, "Euclidean weight of the heuristic")->capture_default_str();
    s->add_flag("--render", solve.render, "Print an ASCII render");
    s->add_option("--ppm", solve.ppm, "Write a pixmap render");
    s->add_option("--json", solve.json_out, "Write the outcome as JSON");
    s->add_flag("--trace", solve.full_trace, "Include the full trace in the JSON output");

    bench::BenchConfig bcfg;
    std::string bench_config_file;
    std::string bench_format = "csv";
    auto* b = app.add_subcommand("bench", "Run methods over a dataset and write metric reports");
    b->add_option("--config", bench_config_file, "JSON config; flags override its values");
    auto* b_dataset = b->add_option("--dataset", bcfg.dataset, "Directory, manifest file or gen:... spec");
    auto* b_methods = b->add_option("--method", bcfg.methods, "Method spec (repeatable)");
    auto* b_sigma = b->add_option("--sigma", bcfg.sigma, "Euclidean weight of the heuristic")->capture_default_str();
    auto* b_output = b->add_option("--output", bcfg.output, "Report file (stdout when omitted)");
    auto* b_format = b->add_option("--format", bench_format, "csv or json")->capture_default_str();
    auto* b_threads = b->add_option("--threads", bcfg.threads, "Worker threads (0: all cores)");

    FitArgs fa;
    std::string fit_config_file;
    auto* f = app.add_subcommand("fit", "Fit (alpha, lambda, kappa) to reference paths");
    f->add_option("--config", fit_config_file, "JSON config; flags override its values");
    auto* f_train = f->add_option("--train", fa.train, "Training dataset");
    auto* f_eval = f->add_option("--eval", fa.eval, "Optional evaluation dataset");
    auto* f_step = f->add_option("--grid-step", fa.config.grid_step, "Coarse sweep step")->capture_default_str();
    auto* f_iters = f->add_option("--refine-iters", fa.config.refine_iters, "Refinement rounds")->capture_default_str();
    auto* f_shrink =
        f->add_option("--refine-shrink", fa.config.refine_shrink, "Step shrink factor")->capture_default_str();
    auto* f_kmax = f->add_option("--kappa-max", fa.config.kappa_max, "Upper bound for kappa")->capture_default_str();
    auto* f_sigma = f->add_option("--sigma", fa.config.sigma, "Euclidean weight of the heuristic")->capture_default_str();
    auto* f_seed = f->add_option("--seed", fa.config.seed, "Seed recorded with the result")->capture_default_str();
    auto* f_preset = f->add_option("--preset", fa.preset, "Start from a named preset");
    auto* f_out = f->add_option("--out", fa.out_file, "FitResult JSON file");
    auto* f_curve = f->add_option("--curve", fa.curve_file, "Loss-curve CSV file");
    auto* f_threads = f->add_option("--threads", fa.config.threads, "Worker threads (0: all cores)");

    ConvertArgs conv;
    auto* c = app.add_subcommand("convert", "Convert between MovingAI maps and instance JSON");
    c->add_option("--map", conv.map, "Map file (MovingAI or cost-map text)");
    c->add_option("--instance", conv.instance, "Instance JSON to export as a MovingAI map");
    c->add_option("--source", conv.source, "Source as row,col");
    c->add_option("--target", conv.target, "Target as row,col");
    c->add_option("--out", conv.out_file, "Output file")->required();
    c->add_flag("--no-reference", conv.no_reference, "Do not attach a Dijkstra reference path");

    fa.config.threads = 0;
    try {
        // CLI11 consumes arguments from the back; drop the program name.
        std::vector<std::string> rev(args.empty() ? args.end() : args.begin() + 1, args.end());
        std::reverse(rev.begin(), rev.end());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kSuccess : kUsage;
    }

    try {
        if (g->parsed()) return cmd_gen(gen, out);
        if (s->parsed()) return cmd_solve(solve, out, err);
        if (b->parsed()) {
            const auto config = load_config(bench_config_file);
            from_config(config, "dataset", b_dataset, bcfg.dataset);
            from_config(config, "methods", b_methods, bcfg.methods);
            from_config(config, "sigma", b_sigma, bcfg.sigma);
            from_config(config, "output", b_output, bcfg.output);
            from_config(config, "format", b_format, bench_format);
            from_config(config, "threads", b_threads, bcfg.threads);
            if (bcfg.dataset.empty()) throw ContractError("bench needs --dataset");
            if (bcfg.methods.empty()) throw ContractError("bench needs at least one --method");
            if (bench_format == "csv") bcfg.format = bench::ReportFormat::csv;
            else if (bench_format == "json") bcfg.format = bench::ReportFormat::json;
            else throw ContractError("unknown format '" + bench_format + "'");
            return cmd_bench(bcfg, out);
        }
        if (f->parsed()) {
            const auto config = load_config(fit_config_file);
            from_config(config, "train", f_train, fa.train);
            from_config(config, "eval", f_eval, fa.eval);
            from_config(config, "grid_step", f_step, fa.config.grid_step);
            from_config(config, "refine_iters", f_iters, fa.config.refine_iters);
            from_config(config, "refine_shrink", f_shrink, fa.config.refine_shrink);
            from_config(config, "kappa_max", f_kmax, fa.config.kappa_max);
            from_config(config, "sigma", f_sigma, fa.config.sigma);
            from_config(config, "seed", f_seed, fa.config.seed);
            from_config(config, "preset", f_preset, fa.preset);
            from_config(config, "out", f_out, fa.out_file);
            from_config(config, "curve", f_curve, fa.curve_file);
            from_config(config, "threads", f_threads, fa.config.threads);
            if (fa.train.empty()) throw ContractError("fit needs --train");
            return cmd_fit(fa, out);
        }
        if (c->parsed()) return cmd_convert(conv, out);
    } catch (const InternalError& e) {
        err << "internal error: " << e.what() << "\n";
        return kInternalError;
    } catch (const ContractError& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    }
    return kUsage;
}

}  // namespace apf::cli
